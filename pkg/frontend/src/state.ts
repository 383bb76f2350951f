// Session state for the analyze / revise loop. The history is append-only:
// every analysis produces a new Session value and old ones are never mutated,
// so a revision loop of N runs always yields a history of length N.

import type { PipelineResponse } from "./api.js";

export interface AnalysisRecord {
  readonly reviewText: string;
  readonly response: PipelineResponse;
}

export interface Session {
  readonly history: readonly AnalysisRecord[];
}

export function emptySession(): Session {
  return { history: [] };
}

export function recordAnalysis(
  session: Session,
  reviewText: string,
  response: PipelineResponse,
): Session {
  return { history: [...session.history, { reviewText, response }] };
}

export interface LabelDelta {
  label: string;
  before: number;
  after: number;
  delta: number;
}

// Per-label issue-count difference between two pipeline runs. Labels present
// in either run appear once, sorted, with missing counts treated as zero.
export function deltaByLabel(
  before: Record<string, number>,
  after: Record<string, number>,
): LabelDelta[] {
  const labels = [...new Set([...Object.keys(before), ...Object.keys(after)])].sort();
  return labels.map((label) => {
    const b = before[label] ?? 0;
    const a = after[label] ?? 0;
    return { label, before: b, after: a, delta: a - b };
  });
}

export function latestDelta(session: Session): LabelDelta[] | null {
  const n = session.history.length;
  if (n < 2) {
    return null;
  }
  const prev = session.history[n - 2];
  const curr = session.history[n - 1];
  if (!prev || !curr) {
    return null;
  }
  return deltaByLabel(prev.response.issue_counts, curr.response.issue_counts);
}
