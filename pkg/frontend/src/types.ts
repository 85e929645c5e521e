// Wire types mirroring the simplemt service payloads.

export interface TokenView {
  surface: string;
  start: number;
  end: number;
  is_word: boolean;
  aoa: number | null;
}

export interface Analysis {
  text: string;
  target_age: number;
  tokens: TokenView[];
  max_word: string | null;
  max_aoa: number | null;
  max_index: number | null;
  success: boolean;
}

export interface IterationRecord {
  index: number;
  input_sentence: string;
  target_words: string[];
  output_sentence: string;
  max_aoa_before: number | null;
  max_aoa_after: number | null;
}

export interface SimplifyRequestBody {
  translation: string;
  source?: string;
  target_age?: number;
  mode?: string;
  variant?: string;
  max_iterations?: number;
}

export interface SimplifyResponse {
  final_sentence: string;
  success: boolean;
  iterations: IterationRecord[];
  stop_reason: string;
  analysis: Analysis;
}

export interface StepRequestBody {
  translation: string;
  words: string[];
  source?: string;
  target_age?: number;
  session?: string;
}

export interface StepResponse {
  output_sentence: string;
  success: boolean;
  stop_reason: string;
  analysis: Analysis;
  session: string;
}
