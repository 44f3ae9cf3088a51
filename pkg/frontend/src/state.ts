import type { Action, NeighborhoodPayload } from './types'

// The view is a pure projection of the last service response plus the trail
// of actions that led to it; no lattice math happens on the client.

export interface Crumb {
  label: string
  context: string
  action: Action
  /** true when this crumb followed a relational move into another context */
  contextSwitch: boolean
}

export interface ViewState {
  sessionId: string | null
  activeContext: string | null
  payload: NeighborhoodPayload | null
  trail: Crumb[]
  error: string | null
  busy: boolean
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    activeContext: null,
    payload: null,
    trail: [],
    error: null,
    busy: false,
  }
}

export function crumbLabel(action: Action, payload: NeighborhoodPayload): string {
  if (action.kind === 'query') {
    const attrs = action.attributes.length
      ? action.attributes.join(', ')
      : 'everything'
    return `${payload.focus.name} ← {${attrs}}`
  }
  const arrow =
    action.direction === 'up' ? '↑' : action.direction === 'down' ? '↓' : '⇢'
  return `${arrow} ${payload.focus.name}`
}

/** Fold a successful response into the state, appending to the trail. */
export function applyResponse(
  state: ViewState,
  action: Action,
  payload: NeighborhoodPayload,
): ViewState {
  const switched =
    state.activeContext !== null && payload.context !== state.activeContext
  const crumb: Crumb = {
    label: crumbLabel(action, payload),
    context: payload.context,
    action,
    contextSwitch: switched,
  }
  return {
    ...state,
    activeContext: payload.context,
    payload,
    trail: [...state.trail, crumb],
    error: null,
    busy: false,
  }
}

/** Replaying a breadcrumb reruns the action prefix that produced it. */
export function trailPrefix(state: ViewState, index: number): Action[] {
  return state.trail.slice(0, index + 1).map((crumb) => crumb.action)
}

export function withError(state: ViewState, message: string): ViewState {
  return { ...state, error: message, busy: false }
}

export function withBusy(state: ViewState, busy: boolean): ViewState {
  return { ...state, busy }
}
