// Wire types mirroring the /v1 JSON payloads.

export interface IntrinsicEntry {
  kind: 'intrinsic'
  name: string
}

export interface RelationalEntry {
  kind: 'relational'
  op: string
  relation: string
  display: string
  target: {
    context: string
    name: string
    extent: string[]
  }
}

export type IntentEntry = IntrinsicEntry | RelationalEntry

export interface ConceptPayload {
  name: string
  context: string
  extent: string[]
  intent: IntentEntry[]
}

export interface RelationalCoverPayload {
  relation: string
  op: string
  concept: ConceptPayload
}

export interface NeighborhoodPayload {
  context: string
  warning: boolean
  focus: ConceptPayload
  upper: ConceptPayload[]
  lower: ConceptPayload[]
  relational: RelationalCoverPayload[]
}

export interface ContextSummary {
  id: string
  objects: string[]
  attributes: string[]
}

export interface RelationSummary {
  name: string
  source: string
  target: string
}

export interface ContextsPayload {
  contexts: ContextSummary[]
  relations: RelationSummary[]
}

export interface StrategyEntry {
  relation: string
  op: string
}

export type StepDirection = 'up' | 'down' | 'relational'

export type Action =
  | { kind: 'query'; attributes: string[] }
  | { kind: 'step'; direction: StepDirection; target: string }
