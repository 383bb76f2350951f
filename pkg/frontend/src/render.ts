// Pure HTML-string builders. No DOM access here so tests can run in plain
// node. Every number these emit is copied verbatim from a service response
// field; nothing is computed client-side.

import type {
  FeedbackEntry,
  LabelInfo,
  PipelineResponse,
  StandaloneFeedbackEntry,
} from "./api.js";
import { ApiError } from "./api.js";
import type { LabelDelta } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function num(value: number): string {
  return escapeHtml(String(value));
}

interface CardParts {
  segmentIndex: number;
  label: string;
  segmentText: string;
  suggestion: string;
  fitness: FeedbackEntry["fitness"];
}

function card(parts: CardParts): string {
  const f = parts.fitness;
  return [
    `<article class="feedback-card" data-segment="${num(parts.segmentIndex)}"` +
      ` data-label="${escapeHtml(parts.label)}">`,
    `<h3>${escapeHtml(parts.label)}</h3>`,
    `<blockquote>${escapeHtml(parts.segmentText)}</blockquote>`,
    `<p class="suggestion">${escapeHtml(parts.suggestion)}</p>`,
    `<dl class="fitness">`,
    `<dt>length</dt><dd>${num(f.sc_len)}</dd>`,
    `<dt>template</dt><dd>${num(f.sc_temp)}</dd>`,
    `<dt>readability</dt><dd>${num(f.sc_read)}</dd>`,
    `<dt>forbidden</dt><dd>${num(f.pen_forb)}</dd>`,
    `<dt>total</dt><dd>${num(f.total)}</dd>`,
    `</dl>`,
    `<button type="button" class="regenerate">regenerate feedback</button>`,
    `</article>`,
  ].join("");
}

function feedbackCard(entry: FeedbackEntry, response: PipelineResponse): string {
  const segment = response.segments[entry.segment];
  return card({
    segmentIndex: entry.segment,
    label: entry.label,
    segmentText: segment ? segment.text : "",
    suggestion: entry.text,
    fitness: entry.fitness,
  });
}

// replacement card for one label of one segment, produced from a standalone
// feedback response; same article shape as the pipeline cards so it can
// swap in for the original in place
export function renderRegeneratedCard(
  segmentIndex: number,
  segmentText: string,
  entry: StandaloneFeedbackEntry,
): string {
  return card({
    segmentIndex,
    label: entry.label,
    segmentText,
    suggestion: entry.text,
    fitness: entry.fitness,
  });
}

export function renderReport(response: PipelineResponse): string {
  if (response.issue_total === 0) {
    return [
      `<div class="report report-clean">`,
      `<p class="all-clear">no issues detected</p>`,
      `</div>`,
    ].join("");
  }
  const cards = response.feedback.map((entry) => feedbackCard(entry, response)).join("");
  const countRows = Object.entries(response.issue_counts)
    .map(([label, count]) => `<li>${escapeHtml(label)}: ${num(count)}</li>`)
    .join("");
  return [
    `<div class="report">`,
    `<p class="issue-total">issues found: ${num(response.issue_total)}</p>`,
    `<ul class="issue-counts">${countRows}</ul>`,
    cards,
    `</div>`,
  ].join("");
}

export function renderDelta(deltas: LabelDelta[]): string {
  if (deltas.length === 0) {
    return `<div class="delta delta-empty"><p>no labels to compare</p></div>`;
  }
  const rows = deltas
    .map((d) => {
      const sign = d.delta > 0 ? "+" : "";
      const cls = d.delta < 0 ? "improved" : d.delta > 0 ? "regressed" : "unchanged";
      return [
        `<tr class="${cls}">`,
        `<td>${escapeHtml(d.label)}</td>`,
        `<td>${num(d.before)}</td>`,
        `<td>${num(d.after)}</td>`,
        `<td>${sign}${num(d.delta)}</td>`,
        `</tr>`,
      ].join("");
    })
    .join("");
  return [
    `<table class="delta">`,
    `<thead><tr><th>label</th><th>before</th><th>after</th><th>change</th></tr></thead>`,
    `<tbody>${rows}</tbody>`,
    `</table>`,
  ].join("");
}

export function renderError(err: unknown): string {
  if (err instanceof ApiError) {
    const stage = err.stage;
    if (stage !== null) {
      return `<div class="banner banner-error">analysis failed in the ${escapeHtml(stage)} stage</div>`;
    }
    return `<div class="banner banner-error">${escapeHtml(err.message)}</div>`;
  }
  const message = err instanceof Error ? err.message : "unexpected error";
  return `<div class="banner banner-error">${escapeHtml(message)}</div>`;
}

// guide for the labels that actually appear in a report, built from the
// service label registry; labels the report never mentions are left out
export function renderLegend(labels: LabelInfo[], response: PipelineResponse): string {
  const present = new Set(Object.keys(response.issue_counts));
  const rows = labels.filter((info) => present.has(info.key));
  if (rows.length === 0) {
    return "";
  }
  const items = rows
    .map((info) =>
      [
        `<li data-label="${escapeHtml(info.key)}">`,
        `<strong>${escapeHtml(info.display)}</strong> `,
        `<code>${escapeHtml(info.key)}</code>`,
        `<p>${escapeHtml(info.rationale)}</p>`,
        `</li>`,
      ].join(""),
    )
    .join("");
  return `<ul class="legend">${items}</ul>`;
}

export function renderHistoryEntry(reviewText: string): string {
  // history entries carry a snippet of the submitted text, no counts: the
  // only numbers this UI shows are ones the service returned
  const snippet = reviewText.length > 60 ? `${reviewText.slice(0, 57)}...` : reviewText;
  return `<li class="history-entry">${escapeHtml(snippet)}</li>`;
}
