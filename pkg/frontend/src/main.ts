import { ApiClient, ApiError } from './api'
import { render, type AppModel, type Handlers } from './render'
import {
  applyResponse,
  initialState,
  trailPrefix,
  withBusy,
  withError,
} from './state'
import type { Action, StepDirection, StrategyEntry } from './types'

export interface App {
  model: AppModel
  handlers: Handlers
}

/** Wire the client, the state and the renderer together on a root element. */
export function mountApp(root: HTMLElement, client: ApiClient): App {
  const model: AppModel = {
    rcfId: null,
    contexts: null,
    view: initialState(),
  }
  let sessionSetup: { context: string; strategy: StrategyEntry[] } | null = null

  const draw = () => render(root, model, handlers)

  const fail = (error: unknown) => {
    const message =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error)
    model.view = withError(model.view, message)
    draw()
  }

  const perform = async (action: Action) => {
    const sessionId = model.view.sessionId
    if (model.view.busy || !sessionId) return
    model.view = withBusy(model.view, true)
    draw()
    try {
      const payload =
        action.kind === 'query'
          ? await client.query(sessionId, action.attributes)
          : await client.step(sessionId, action.direction, action.target)
      model.view = applyResponse(model.view, action, payload)
    } catch (error) {
      fail(error)
      return
    }
    draw()
  }

  const handlers: Handlers = {
    onLoadDocument(text: string) {
      client
        .loadRcf(text)
        .then(async ({ rcf_id }) => {
          model.rcfId = rcf_id
          model.contexts = await client.contexts(rcf_id)
          draw()
        })
        .catch(fail)
    },

    onCreateSession(context: string, strategy: StrategyEntry[]) {
      if (!model.rcfId) return
      client
        .createSession(model.rcfId, context, strategy)
        .then(({ session_id }) => {
          sessionSetup = { context, strategy }
          model.view = {
            ...initialState(),
            sessionId: session_id,
            activeContext: context,
          }
          draw()
        })
        .catch(fail)
    },

    onQuery(attributes: string[]) {
      void perform({ kind: 'query', attributes })
    },

    onStep(direction: StepDirection, target: string) {
      void perform({ kind: 'step', direction, target })
    },

    onCrumb(index: number) {
      // Reproduce the earlier view by re-issuing the trail prefix against a
      // fresh session; replay is deterministic server-side.
      if (!model.rcfId || !sessionSetup || model.view.busy) return
      const actions = trailPrefix(model.view, index)
      const setup = sessionSetup
      model.view = withBusy(model.view, true)
      draw()
      client
        .createSession(model.rcfId, setup.context, setup.strategy)
        .then(async ({ session_id }) => {
          let view: typeof model.view = {
            ...initialState(),
            sessionId: session_id,
            activeContext: setup.context,
          }
          for (const action of actions) {
            const payload =
              action.kind === 'query'
                ? await client.query(session_id, action.attributes)
                : await client.step(session_id, action.direction, action.target)
            view = applyResponse(view, action, payload)
          }
          model.view = view
          draw()
        })
        .catch(fail)
    },
  }

  draw()
  return { model, handlers }
}

declare global {
  interface Window {
    rcanavApp?: App
  }
}

if (typeof document !== 'undefined' && document.getElementById('app-root')) {
  window.rcanavApp = mountApp(
    document.getElementById('app-root') as HTMLElement,
    new ApiClient(''),
  )
}
