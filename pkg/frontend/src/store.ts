import { ApiClient, ApiError } from "./api.js";
import type { Analysis } from "./types.js";

export interface TimelineEntry {
  kind: "click" | "auto";
  words: string[];
  before: string;
  after: string;
  stop_reason: string;
  success: boolean;
}

export type Banner = "success" | "iteration_cap" | null;

export interface ViewState {
  source: string;
  sentence: string;
  targetAge: number;
  analysis: Analysis | null;
  timeline: TimelineEntry[];
  pending: boolean;
  banner: Banner;
  error: string | null;
  session: string | null;
  autoSteps: number;
}

export interface WorkbenchOptions {
  defaultTargetAge?: number;
  maxAutoSteps?: number;
}

type Listener = (state: ViewState) => void;

/**
 * The workbench state machine. Rendering is a pure function of `state`;
 * every mutation flows through here so the DOM layer stays trivial.
 *
 * One request may be in flight at a time (matching the service's per-session
 * cap); a failed request leaves the sentence state untouched and only sets
 * `error`.
 */
export class Workbench {
  state: ViewState;
  private readonly maxAutoSteps: number;
  private listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    opts: WorkbenchOptions = {},
  ) {
    this.maxAutoSteps = opts.maxAutoSteps ?? 5;
    this.state = {
      source: "",
      sentence: "",
      targetAge: opts.defaultTargetAge ?? 10,
      analysis: null,
      timeline: [],
      pending: false,
      banner: null,
      error: null,
      session: null,
      autoSteps: 0,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Start a session over a fresh (source, translation) pair. */
  async load(source: string, translation: string): Promise<void> {
    if (this.state.pending) return;
    this.set({ pending: true, error: null });
    try {
      const analysis = await this.api.analyze(translation, this.state.targetAge);
      this.set({
        source,
        sentence: translation,
        analysis,
        timeline: [],
        banner: analysis.success ? "success" : null,
        session: null,
        autoSteps: 0,
      });
    } catch (err) {
      this.fail(err);
    } finally {
      this.set({ pending: false });
    }
  }

  /** User clicked a word they don't understand: one /simplify/step for it. */
  async clickWord(surface: string): Promise<void> {
    if (this.state.pending || !this.state.sentence) return;
    this.set({ pending: true, error: null });
    try {
      const resp = await this.api.simplifyStep({
        translation: this.state.sentence,
        words: [surface],
        source: this.state.source || undefined,
        target_age: this.state.targetAge,
        session: this.state.session ?? undefined,
      });
      this.set({
        sentence: resp.output_sentence,
        analysis: resp.analysis,
        session: resp.session,
        timeline: [
          ...this.state.timeline,
          {
            kind: "click",
            words: [surface],
            before: this.state.sentence,
            after: resp.output_sentence,
            stop_reason: resp.stop_reason,
            success: resp.analysis.success,
          },
        ],
        banner: resp.analysis.success ? "success" : null,
      });
    } catch (err) {
      this.fail(err);
    } finally {
      this.set({ pending: false });
    }
  }

  /** One machine-chosen revision (the iterative loop, one press per round). */
  async autoStep(): Promise<void> {
    if (this.state.pending || !this.state.sentence) return;
    this.set({ pending: true, error: null });
    try {
      const resp = await this.api.simplify({
        translation: this.state.sentence,
        source: this.state.source || undefined,
        target_age: this.state.targetAge,
        mode: "single",
        max_iterations: 1,
      });
      const step = resp.iterations[0];
      const autoSteps = this.state.autoSteps + 1;
      const banner: Banner = resp.analysis.success
        ? "success"
        : autoSteps >= this.maxAutoSteps
          ? "iteration_cap"
          : null;
      this.set({
        sentence: resp.final_sentence,
        analysis: resp.analysis,
        autoSteps,
        timeline: step
          ? [
              ...this.state.timeline,
              {
                kind: "auto",
                words: step.target_words,
                before: step.input_sentence,
                after: step.output_sentence,
                stop_reason: resp.stop_reason,
                success: resp.analysis.success,
              },
            ]
          : this.state.timeline,
        banner,
      });
    } catch (err) {
      this.fail(err);
    } finally {
      this.set({ pending: false });
    }
  }

  /** Re-color against a new target age; never rewrites. */
  async setTargetAge(age: number): Promise<void> {
    if (!this.state.sentence) {
      this.set({ targetAge: age });
      return;
    }
    if (this.state.pending) return;
    this.set({ pending: true, error: null });
    try {
      const analysis = await this.api.analyze(this.state.sentence, age);
      this.set({
        targetAge: age,
        analysis,
        banner: analysis.success ? "success" : null,
        autoSteps: 0,
      });
    } catch (err) {
      this.fail(err);
    } finally {
      this.set({ pending: false });
    }
  }

  private fail(err: unknown): void {
    const message = err instanceof ApiError ? err.message : String(err);
    this.set({ error: message });
  }
}

export function hashFor(targetAge: number): string {
  return `#age=${targetAge}`;
}

export function parseHash(hash: string): { age: number | null } {
  const match = /[#&]age=([0-9]+(?:\.[0-9]+)?)/.exec(hash);
  if (!match || match[1] === undefined) return { age: null };
  const age = Number(match[1]);
  return { age: Number.isFinite(age) && age > 0 ? age : null };
}
