/**
 * Wire types for the review service JSON API.
 *
 * These mirror the server's serialization exactly; the frontend never
 * reshapes or re-derives the numbers it receives (the report view in
 * particular renders server values verbatim).
 */

/** One annotated span. `start`/`end` are code-point offsets into the text. */
export interface WireEntity {
  id: number;
  start: number;
  end: number;
  type: string;
}

/** One side of a task: a sentence plus its annotated spans. */
export interface SentencePane {
  text: string;
  entities: WireEntity[];
}

/** A sentence pair queued for review, as served by GET /api/tasks. */
export interface ReviewTask {
  task_id: string;
  language: string;
  sentence_id: string;
  source: SentencePane;
  translated: SentencePane;
  aligned_ids: number[];
  missing_ids: number[];
}

/** Per-entity answers to the three entity questions. */
export interface EntityVerdict {
  transferred: boolean;
  translation_correct: boolean;
  boundary_correct: boolean;
}

/**
 * A completed judgment, as POSTed to /api/judgments. Entity keys are the
 * source entity ids rendered as strings (JSON object keys).
 */
export interface Judgment {
  task_id: string;
  reviewer_id: string;
  meaning_preserved: boolean;
  entities: Record<string, EntityVerdict>;
  submitted_at?: string;
}

/** Server acknowledgment for an accepted judgment. */
export interface JudgmentAck {
  status: string;
  task_id: string;
  submitted_at: string;
}

/** One language row of GET /api/report. */
export interface ReportRow {
  language: string;
  sentences_reviewed: number;
  sentences_meaning_ok: number;
  entities_total: number;
  entities_transferred_ok: number;
  entities_translation_ok: number;
  entities_boundary_ok: number;
}

/** The three per-entity questions, in the order a reviewer answers them. */
export type VerdictKey = "transferred" | "translation_correct" | "boundary_correct";

export const VERDICT_KEYS: readonly VerdictKey[] = [
  "transferred",
  "translation_correct",
  "boundary_correct",
];
