import { describe, expect, it } from "vitest";

import {
  deltaByLabel,
  emptySession,
  latestDelta,
  recordAnalysis,
} from "../src/state.js";
import { FIRST, REVIEW_TEXT_FIRST, REVIEW_TEXT_SECOND, SECOND } from "./fixtures.js";

describe("deltaByLabel", () => {
  it("reports a -1 delta for the label whose flagged sentence was removed", () => {
    const deltas = deltaByLabel(FIRST.issue_counts, SECOND.issue_counts);
    expect(deltas).toEqual([
      { label: "h3-not-novel", before: 1, after: 0, delta: -1 },
      { label: "s5-missing-baselines", before: 1, after: 1, delta: 0 },
    ]);
  });

  it("reports all zeros when nothing changed", () => {
    const deltas = deltaByLabel(FIRST.issue_counts, FIRST.issue_counts);
    expect(deltas.every((d) => d.delta === 0)).toBe(true);
    expect(deltas.map((d) => d.label)).toEqual([
      "h3-not-novel",
      "s5-missing-baselines",
    ]);
  });

  it("treats labels absent from one side as zero", () => {
    const deltas = deltaByLabel({}, { "s5-missing-baselines": 2 });
    expect(deltas).toEqual([
      { label: "s5-missing-baselines", before: 0, after: 2, delta: 2 },
    ]);
  });
});

describe("session history", () => {
  it("appends without mutating earlier sessions", () => {
    const s0 = emptySession();
    const s1 = recordAnalysis(s0, REVIEW_TEXT_FIRST, FIRST);
    const s2 = recordAnalysis(s1, REVIEW_TEXT_SECOND, SECOND);

    expect(s0.history).toHaveLength(0);
    expect(s1.history).toHaveLength(1);
    expect(s2.history).toHaveLength(2);
    expect(s1.history[0]?.response).toBe(FIRST);
    expect(s2.history[0]?.response).toBe(FIRST);
    expect(s2.history[1]?.response).toBe(SECOND);
  });

  it("has no delta until two runs exist", () => {
    const s0 = emptySession();
    expect(latestDelta(s0)).toBeNull();
    const s1 = recordAnalysis(s0, REVIEW_TEXT_FIRST, FIRST);
    expect(latestDelta(s1)).toBeNull();
  });

  it("compares the two most recent runs", () => {
    let session = emptySession();
    session = recordAnalysis(session, REVIEW_TEXT_FIRST, FIRST);
    session = recordAnalysis(session, REVIEW_TEXT_SECOND, SECOND);
    session = recordAnalysis(session, REVIEW_TEXT_SECOND, SECOND);

    expect(session.history).toHaveLength(3);
    const deltas = latestDelta(session);
    expect(deltas).toEqual([
      { label: "s5-missing-baselines", before: 1, after: 1, delta: 0 },
    ]);
  });
});
