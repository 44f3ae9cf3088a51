import type { ViewState } from './state'
import type {
  ConceptPayload,
  ContextsPayload,
  StepDirection,
  StrategyEntry,
} from './types'

export interface AppModel {
  rcfId: string | null
  contexts: ContextsPayload | null
  view: ViewState
}

export interface Handlers {
  onLoadDocument(text: string): void
  onCreateSession(context: string, strategy: StrategyEntry[]): void
  onQuery(attributes: string[]): void
  onStep(direction: StepDirection, target: string): void
  onCrumb(index: number): void
}

const OPERATORS = ['∃', '∃∀']

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value)
  }
  if (text !== undefined) node.textContent = text
  return node
}

function conceptCard(
  concept: ConceptPayload,
  testId: string,
  onClick?: () => void,
  disabled = false,
): HTMLElement {
  const card = el(onClick ? 'button' : 'div', {
    class: 'concept-card',
    'data-testid': testId,
    'data-name': concept.name,
  })
  if (onClick) {
    const button = card as HTMLButtonElement
    button.type = 'button'
    button.disabled = disabled
    button.addEventListener('click', onClick)
  }
  card.appendChild(el('strong', { class: 'concept-name' }, concept.name))
  card.appendChild(
    el('span', { class: 'concept-extent' }, `{${concept.extent.join(', ')}}`),
  )
  return card
}

function setupSection(model: AppModel, handlers: Handlers): HTMLElement {
  const section = el('section', { class: 'setup' })
  section.appendChild(el('h2', {}, 'Load a context family'))
  const input = el('textarea', {
    'data-testid': 'doc-input',
    rows: '8',
    placeholder: 'Paste an rcf/1 JSON document…',
  })
  section.appendChild(input)
  const load = el('button', { 'data-testid': 'load-btn', type: 'button' }, 'Load')
  load.addEventListener('click', () => handlers.onLoadDocument(input.value))
  section.appendChild(load)

  if (model.contexts) {
    const pick = el('div', { class: 'session-setup' })
    pick.appendChild(el('h2', {}, 'Start a session'))
    const select = el('select', { 'data-testid': 'context-select' })
    for (const ctx of model.contexts.contexts) {
      select.appendChild(el('option', { value: ctx.id }, ctx.id))
    }
    pick.appendChild(select)

    const strategyBox = el('div', { class: 'strategy-picker' })
    for (const relation of model.contexts.relations) {
      for (const op of OPERATORS) {
        const label = el('label', { class: 'strategy-entry' })
        const box = el('input', {
          type: 'checkbox',
          'data-testid': 'strategy-entry',
          'data-relation': relation.name,
          'data-op': op,
        })
        label.appendChild(box)
        label.appendChild(
          document.createTextNode(
            ` ${op} ${relation.name} (${relation.source} → ${relation.target})`,
          ),
        )
        strategyBox.appendChild(label)
      }
    }
    pick.appendChild(strategyBox)

    const start = el(
      'button',
      { 'data-testid': 'create-session-btn', type: 'button' },
      'Start exploring',
    )
    start.addEventListener('click', () => {
      const entries: StrategyEntry[] = []
      strategyBox
        .querySelectorAll<HTMLInputElement>('input:checked')
        .forEach((box) =>
          entries.push({
            relation: box.dataset.relation!,
            op: box.dataset.op!,
          }),
        )
      handlers.onCreateSession((select as HTMLSelectElement).value, entries)
    })
    pick.appendChild(start)
    section.appendChild(pick)
  }
  return section
}

function querySection(model: AppModel, handlers: Handlers): HTMLElement {
  const section = el('section', { class: 'query' })
  section.appendChild(el('h2', {}, 'Select attributes'))
  const active = model.view.activeContext
  const summary = model.contexts?.contexts.find((c) => c.id === active)
  const boxHolder = el('div', { class: 'query-attrs' })
  for (const attribute of summary?.attributes ?? []) {
    const label = el('label', { class: 'query-attr-label' })
    const box = el('input', {
      type: 'checkbox',
      'data-testid': 'query-attr',
      'data-attribute': attribute,
    })
    label.appendChild(box)
    label.appendChild(document.createTextNode(` ${attribute}`))
    boxHolder.appendChild(label)
  }
  section.appendChild(boxHolder)
  const submit = el(
    'button',
    { 'data-testid': 'query-btn', type: 'button' },
    'Focus',
  ) as HTMLButtonElement
  submit.disabled = model.view.busy
  submit.addEventListener('click', () => {
    const picked: string[] = []
    boxHolder
      .querySelectorAll<HTMLInputElement>('input:checked')
      .forEach((box) => picked.push(box.dataset.attribute!))
    handlers.onQuery(picked)
  })
  section.appendChild(submit)
  return section
}

function breadcrumbs(model: AppModel, handlers: Handlers): HTMLElement {
  const nav = el('nav', { class: 'breadcrumbs', 'data-testid': 'breadcrumbs' })
  model.view.trail.forEach((crumb, index) => {
    if (crumb.contextSwitch) {
      nav.appendChild(el('span', { class: 'trail-divider' }, `⟦${crumb.context}⟧`))
    }
    const button = el(
      'button',
      { 'data-testid': 'crumb', type: 'button', 'data-index': String(index) },
      crumb.label,
    ) as HTMLButtonElement
    button.disabled = model.view.busy
    button.addEventListener('click', () => handlers.onCrumb(index))
    nav.appendChild(button)
  })
  return nav
}

function focusCard(model: AppModel): HTMLElement {
  const focus = model.view.payload!.focus
  const card = el('div', { class: 'focus-card', 'data-testid': 'focus-card' })
  card.appendChild(el('strong', { 'data-testid': 'focus-name' }, focus.name))
  card.appendChild(
    el(
      'div',
      { class: 'focus-extent', 'data-testid': 'focus-extent' },
      `{${focus.extent.join(', ')}}`,
    ),
  )
  const intent = el('ul', { class: 'focus-intent' })
  for (const entry of focus.intent) {
    intent.appendChild(
      el(
        'li',
        { 'data-testid': 'intent-entry' },
        entry.kind === 'intrinsic' ? entry.name : entry.display,
      ),
    )
  }
  card.appendChild(intent)
  return card
}

function board(model: AppModel, handlers: Handlers): HTMLElement {
  const view = model.view
  const payload = view.payload!
  const main = el('main', { class: 'board' })

  if (payload.warning) {
    main.appendChild(
      el(
        'div',
        { class: 'warning', 'data-testid': 'warning-banner' },
        'The query selects no objects; showing the bottom concept.',
      ),
    )
  }

  const uppers = el('div', { class: 'covers uppers', 'data-testid': 'upper-covers' })
  for (const concept of payload.upper) {
    uppers.appendChild(
      conceptCard(
        concept,
        'upper-node',
        () => handlers.onStep('up', concept.name),
        view.busy,
      ),
    )
  }
  main.appendChild(uppers)
  main.appendChild(focusCard(model))
  const lowers = el('div', { class: 'covers lowers', 'data-testid': 'lower-covers' })
  for (const concept of payload.lower) {
    lowers.appendChild(
      conceptCard(
        concept,
        'lower-node',
        () => handlers.onStep('down', concept.name),
        view.busy,
      ),
    )
  }
  main.appendChild(lowers)
  return main
}

function relationalPanel(model: AppModel, handlers: Handlers): HTMLElement {
  const payload = model.view.payload!
  const aside = el('aside', {
    class: 'relational-panel',
    'data-testid': 'relational-panel',
  })
  aside.appendChild(el('h2', {}, 'Relational covers'))
  for (const cover of payload.relational) {
    const row = el('div', { class: 'relational-row' })
    row.appendChild(
      el('span', { class: 'operator-glyph', 'data-testid': 'relational-op' }, cover.op),
    )
    row.appendChild(el('span', { class: 'relation-name' }, ` ${cover.relation} → `))
    row.appendChild(
      conceptCard(
        cover.concept,
        'relational-node',
        () => handlers.onStep('relational', cover.concept.name),
        model.view.busy,
      ),
    )
    aside.appendChild(row)
  }
  return aside
}

export function render(root: HTMLElement, model: AppModel, handlers: Handlers): void {
  root.textContent = ''
  const app = el('div', { class: 'app' })

  const header = el('header', {})
  header.appendChild(el('h1', {}, 'Concept neighbourhood explorer'))
  header.appendChild(
    el(
      'div',
      { class: 'context-banner', 'data-testid': 'context-banner' },
      model.view.activeContext ?? 'no session',
    ),
  )
  app.appendChild(header)

  if (model.view.error) {
    app.appendChild(
      el('div', { class: 'error-banner', 'data-testid': 'error-banner' }, model.view.error),
    )
  }

  if (!model.view.sessionId) {
    app.appendChild(setupSection(model, handlers))
  } else {
    app.appendChild(querySection(model, handlers))
    app.appendChild(breadcrumbs(model, handlers))
    if (model.view.payload) {
      app.appendChild(board(model, handlers))
      app.appendChild(relationalPanel(model, handlers))
    }
  }
  root.appendChild(app)
}
