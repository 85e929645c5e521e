import { band } from "./color.js";
import type { ViewState } from "./store.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * The sentence as clickable token spans, colored from the latest analysis.
 * Inter-token text (spaces, original spelling) comes straight from the
 * analyzed text via char spans, so the rendering mirrors the service exactly.
 */
export function renderTokens(state: ViewState): string {
  const analysis = state.analysis;
  if (!analysis) return "";
  const parts: string[] = [];
  let pos = 0;
  analysis.tokens.forEach((tok, i) => {
    parts.push(escapeHtml(analysis.text.slice(pos, tok.start)));
    if (tok.is_word) {
      const b = band(tok.aoa, state.targetAge);
      const title = tok.aoa === null ? "unrated" : `AoA ${tok.aoa.toFixed(2)}`;
      const disabled = state.pending ? " disabled" : "";
      parts.push(
        `<button class="tok ${b}"${disabled} data-index="${i}" data-word="${escapeHtml(tok.surface)}" ` +
          `title="${title}">${escapeHtml(tok.surface)}</button>`,
      );
    } else {
      parts.push(`<span class="punct">${escapeHtml(tok.surface)}</span>`);
    }
    pos = tok.end;
  });
  parts.push(escapeHtml(analysis.text.slice(pos)));
  return parts.join("");
}

export function renderTimeline(state: ViewState): string {
  if (!state.timeline.length) return `<p class="empty">No rewrites yet.</p>`;
  const items = state.timeline.map((entry, i) => {
    const words = entry.words.map((w) => `<code>${escapeHtml(w)}</code>`).join(", ");
    const tag = entry.kind === "auto" ? "auto" : "you";
    return (
      `<li><span class="step-no">${i + 1}</span> <span class="step-kind">${tag}</span> ` +
      `targeted ${words || "<em>nothing</em>"}<br>` +
      `<span class="before">${escapeHtml(entry.before)}</span><br>` +
      `<span class="after">${escapeHtml(entry.after)}</span></li>`
    );
  });
  return `<ol class="timeline">${items.join("")}</ol>`;
}

export function renderBanner(state: ViewState): string {
  if (state.error) return `<div class="banner error">${escapeHtml(state.error)}</div>`;
  if (state.banner === "success") {
    return `<div class="banner success">Every rated word is below age ${state.targetAge}.</div>`;
  }
  if (state.banner === "iteration_cap") {
    return `<div class="banner cap">Iteration cap reached without success (stop_reason: iteration_cap).</div>`;
  }
  return "";
}

export function renderStatus(state: ViewState): string {
  const analysis = state.analysis;
  if (!analysis) return "Paste a translation and load it.";
  if (analysis.max_word === null) return "No rated words in this sentence.";
  return `Hardest word: "${escapeHtml(analysis.max_word)}" (AoA ${analysis.max_aoa?.toFixed(2)})`;
}
