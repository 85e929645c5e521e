import { ApiClient } from "./api.js";
import { hashFor, parseHash, Workbench } from "./store.js";
import { renderBanner, renderStatus, renderTimeline, renderTokens } from "./render.js";

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8707";
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const workbench = new Workbench(new ApiClient(apiBase()), {
  defaultTargetAge: parseHash(window.location.hash).age ?? 10,
});

const sentenceEl = el<HTMLDivElement>("sentence");
const timelineEl = el<HTMLDivElement>("timeline");
const bannerEl = el<HTMLDivElement>("banner");
const statusEl = el<HTMLDivElement>("status");
const ageInput = el<HTMLInputElement>("age");
const ageLabel = el<HTMLSpanElement>("age-label");
const autoButton = el<HTMLButtonElement>("auto-step");
const loadButton = el<HTMLButtonElement>("load");
const sourceInput = el<HTMLTextAreaElement>("source");
const translationInput = el<HTMLTextAreaElement>("translation");

workbench.subscribe((state) => {
  sentenceEl.innerHTML = renderTokens(state);
  timelineEl.innerHTML = renderTimeline(state);
  bannerEl.innerHTML = renderBanner(state);
  statusEl.textContent = renderStatus(state);
  ageLabel.textContent = String(state.targetAge);
  autoButton.disabled = state.pending || !state.sentence;
  loadButton.disabled = state.pending;
  document.body.classList.toggle("pending", state.pending);
});

sentenceEl.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest<HTMLButtonElement>("button.tok");
  if (!target || target.disabled) return;
  void workbench.clickWord(target.dataset.word ?? "");
});

autoButton.addEventListener("click", () => void workbench.autoStep());

loadButton.addEventListener("click", () => {
  void workbench.load(sourceInput.value.trim(), translationInput.value.trim());
});

ageInput.value = String(workbench.state.targetAge);
ageLabel.textContent = ageInput.value;
ageInput.addEventListener("change", () => {
  const age = Number(ageInput.value);
  window.location.hash = hashFor(age);
  void workbench.setTargetAge(age);
});

window.addEventListener("hashchange", () => {
  const { age } = parseHash(window.location.hash);
  if (age !== null && age !== workbench.state.targetAge) {
    ageInput.value = String(age);
    void workbench.setTargetAge(age);
  }
});
