export type Band = "easy" | "near" | "hard" | "none";

export const DEFAULT_NEAR_MARGIN = 2;

/**
 * Triage band for a rated token: hard at or above the target age, near within
 * `margin` years below it, easy at `target - margin` or lower. Unrated tokens
 * are unbanded.
 */
export function band(aoa: number | null, targetAge: number, margin = DEFAULT_NEAR_MARGIN): Band {
  if (aoa === null) return "none";
  if (aoa >= targetAge) return "hard";
  if (aoa > targetAge - margin) return "near";
  return "easy";
}
