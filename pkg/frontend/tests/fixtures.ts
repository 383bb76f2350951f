// Scripted service responses for a two-step analyze / revise loop. FIRST is
// a three-sentence review with two flagged segments; SECOND is the same
// review after the reviewer deleted the novelty complaint; CLEAN has no
// issues at all. Fixture text avoids apostrophes so HTML entity escapes
// never introduce stray digits into rendered output.

import type { FeedbackResponse, LabelsResponse, PipelineResponse } from "../src/api.js";

export const FIRST: PipelineResponse = {
  review_id: "adhoc",
  sentences: [
    { index: 0, text: "The method is not novel.", section: "weaknesses" },
    { index: 1, text: "No baselines are compared.", section: "weaknesses" },
    { index: 2, text: "The figures look clean.", section: "presentation" },
  ],
  tags: ["B", "B", "B"],
  segments: [
    {
      start: 0,
      end: 0,
      text: "The method is not novel.",
      labels: ["h3-not-novel"],
      scores: { "h3-not-novel": 0.91 },
    },
    {
      start: 1,
      end: 1,
      text: "No baselines are compared.",
      labels: ["s5-missing-baselines"],
      scores: { "s5-missing-baselines": 0.84 },
    },
    {
      start: 2,
      end: 2,
      text: "The figures look clean.",
      labels: [],
      scores: {},
    },
  ],
  feedback: [
    {
      segment: 0,
      label: "h3-not-novel",
      text: "Name the prior work you mean and state what overlaps.",
      fitness: { sc_len: 0.2, sc_temp: 0.5, sc_read: 1, pen_forb: 0, total: 0.955 },
      generation: 3,
      parent_ids: ["g2-c1", "g2-c4"],
      tie_applied: false,
    },
    {
      segment: 1,
      label: "s5-missing-baselines",
      text: "List the baselines you expected and why they apply.",
      fitness: { sc_len: 0.25, sc_temp: 0.4, sc_read: 0.88, pen_forb: 0.1, total: 0.7215 },
      generation: 2,
      parent_ids: ["g1-c0", "g1-c3"],
      tie_applied: false,
    },
  ],
  issue_counts: { "h3-not-novel": 1, "s5-missing-baselines": 1 },
  issue_total: 2,
};

export const SECOND: PipelineResponse = {
  review_id: "adhoc",
  sentences: [
    { index: 0, text: "No baselines are compared.", section: "weaknesses" },
    { index: 1, text: "The figures look clean.", section: "presentation" },
  ],
  tags: ["B", "B"],
  segments: [
    {
      start: 0,
      end: 0,
      text: "No baselines are compared.",
      labels: ["s5-missing-baselines"],
      scores: { "s5-missing-baselines": 0.84 },
    },
    {
      start: 1,
      end: 1,
      text: "The figures look clean.",
      labels: [],
      scores: {},
    },
  ],
  feedback: [
    {
      segment: 0,
      label: "s5-missing-baselines",
      text: "List the baselines you expected and why they apply.",
      fitness: { sc_len: 0.25, sc_temp: 0.4, sc_read: 0.88, pen_forb: 0.1, total: 0.7215 },
      generation: 2,
      parent_ids: ["g1-c0", "g1-c3"],
      tie_applied: false,
    },
  ],
  issue_counts: { "s5-missing-baselines": 1 },
  issue_total: 1,
};

export const CLEAN: PipelineResponse = {
  review_id: "adhoc",
  sentences: [{ index: 0, text: "The figures look clean.", section: "presentation" }],
  tags: ["B"],
  segments: [
    { start: 0, end: 0, text: "The figures look clean.", labels: [], scores: {} },
  ],
  feedback: [],
  issue_counts: {},
  issue_total: 0,
};

export const REVIEW_TEXT_FIRST =
  "The method is not novel. No baselines are compared. The figures look clean.";

export const REVIEW_TEXT_SECOND =
  "No baselines are compared. The figures look clean.";

// label metadata as served by /v1/labels; includes one label that never
// appears in FIRST so legend filtering is observable
export const LABELS: LabelsResponse = {
  registry_version: "arr-guidelines-25",
  labels: [
    {
      key: "h3-not-novel",
      kind: "lazy",
      display: "Novelty dismissed without evidence",
      rationale: "A novelty complaint should point at the prior work it has in mind.",
    },
    {
      key: "s5-missing-baselines",
      kind: "specificity",
      display: "Baselines requested but unnamed",
      rationale: "Asking for baselines is only actionable when the baselines are named.",
    },
    {
      key: "h1-contradict",
      kind: "lazy",
      display: "Contradicts the paper without a quote",
      rationale: "A contradiction claim should cite the contradicted passage.",
    },
  ],
};

// standalone regeneration as served by /v1/feedback for the novelty card
export const REGEN: FeedbackResponse = {
  feedback: [
    {
      label: "h3-not-novel",
      text: "Cite the specific prior paper and compare its representation.",
      fitness: { sc_len: 0.22, sc_temp: 0.45, sc_read: 0.97, pen_forb: 0, total: 0.918 },
      generation: 4,
      parent_ids: ["g3-c2", "g3-c5"],
      tie_applied: false,
    },
  ],
};
