/**
 * Review session state: the per-task judgment form with its completeness
 * gating, the keyboard question cursor, and the multi-task flow that
 * advances through unjudged tasks as the server acknowledges submissions.
 */

import { ApiError, ReviewApiClient } from "./api";
import type {
  EntityVerdict,
  Judgment,
  JudgmentAck,
  ReviewTask,
  VerdictKey,
} from "./types";
import { VERDICT_KEYS } from "./types";

/** Answers collected so far for one entity; null means unanswered. */
export interface PartialVerdict {
  transferred: boolean | null;
  translation_correct: boolean | null;
  boundary_correct: boolean | null;
}

/**
 * Form state for one task. A judgment covers the overall-meaning question
 * plus, per source entity, the transfer question and - only when the entity
 * transferred - the translation and boundary questions. Entities answered
 * "not transferred" have their follow-ups recorded as false.
 */
export class TaskForm {
  readonly task: ReviewTask;
  private meaning: boolean | null = null;
  private readonly verdicts = new Map<number, PartialVerdict>();

  constructor(task: ReviewTask) {
    this.task = task;
    for (const entity of task.source.entities) {
      this.verdicts.set(entity.id, {
        transferred: null,
        translation_correct: null,
        boundary_correct: null,
      });
    }
  }

  get meaningPreserved(): boolean | null {
    return this.meaning;
  }

  setMeaning(value: boolean): void {
    this.meaning = value;
  }

  verdict(entityId: number): Readonly<PartialVerdict> {
    const v = this.verdicts.get(entityId);
    if (v === undefined) throw new Error(`no source entity with id ${entityId}`);
    return v;
  }

  /** Follow-up questions apply only once the entity is marked transferred. */
  isApplicable(entityId: number, key: VerdictKey): boolean {
    if (key === "transferred") return true;
    return this.verdict(entityId).transferred === true;
  }

  /**
   * Record one answer. Returns false (and changes nothing) when the
   * question is not applicable, so disabled controls and stray keystrokes
   * are inert rather than corrupting.
   */
  setVerdict(entityId: number, key: VerdictKey, value: boolean): boolean {
    const v = this.verdicts.get(entityId);
    if (v === undefined) throw new Error(`no source entity with id ${entityId}`);
    if (!this.isApplicable(entityId, key)) return false;
    v[key] = value;
    if (key === "transferred" && !value) {
      // Marking not-transferred retires the follow-ups.
      v.translation_correct = null;
      v.boundary_correct = null;
    }
    return true;
  }

  /** Submission is gated on every applicable question being answered. */
  isComplete(): boolean {
    if (this.meaning === null) return false;
    for (const v of this.verdicts.values()) {
      if (v.transferred === null) return false;
      if (v.transferred && (v.translation_correct === null || v.boundary_correct === null)) {
        return false;
      }
    }
    return true;
  }

  /** Applicable questions still unanswered, in reviewer order. */
  unansweredCount(): number {
    let n = this.meaning === null ? 1 : 0;
    for (const v of this.verdicts.values()) {
      if (v.transferred === null) {
        n += 1;
      } else if (v.transferred) {
        if (v.translation_correct === null) n += 1;
        if (v.boundary_correct === null) n += 1;
      }
    }
    return n;
  }

  /** The wire judgment; not-transferred follow-ups are coerced to false. */
  buildJudgment(reviewerId: string): Judgment {
    if (!this.isComplete()) {
      throw new Error("judgment incomplete: answer every applicable question first");
    }
    const entities: Record<string, EntityVerdict> = {};
    for (const [id, v] of this.verdicts) {
      const transferred = v.transferred as boolean;
      entities[String(id)] = {
        transferred,
        translation_correct: transferred ? (v.translation_correct as boolean) : false,
        boundary_correct: transferred ? (v.boundary_correct as boolean) : false,
      };
    }
    return {
      task_id: this.task.task_id,
      reviewer_id: reviewerId,
      meaning_preserved: this.meaning as boolean,
      entities,
    };
  }
}

/** A pending question: the meaning question or one entity verdict. */
export type Question =
  | { kind: "meaning" }
  | { kind: "verdict"; entityId: number; key: VerdictKey };

/**
 * Keyboard-first entry: the cursor always points at the first unanswered
 * applicable question (meaning first, then each entity's questions in span
 * order). Answering "not transferred" removes that entity's follow-ups from
 * the sequence, so a reviewer can drive a whole task with y/n keys alone.
 */
export class QuestionCursor {
  constructor(private readonly form: TaskForm) {}

  current(): Question | null {
    if (this.form.meaningPreserved === null) return { kind: "meaning" };
    for (const entity of this.form.task.source.entities) {
      const v = this.form.verdict(entity.id);
      for (const key of VERDICT_KEYS) {
        if (v[key] === null && this.form.isApplicable(entity.id, key)) {
          return { kind: "verdict", entityId: entity.id, key };
        }
      }
    }
    return null;
  }

  /** Answer the current question; returns false when nothing is pending. */
  answer(value: boolean): boolean {
    const q = this.current();
    if (q === null) return false;
    if (q.kind === "meaning") {
      this.form.setMeaning(value);
      return true;
    }
    return this.form.setVerdict(q.entityId, q.key, value);
  }
}

/**
 * Multi-task flow for one language. Tasks keep the server's order; the
 * session walks them front to back, skipping already-acknowledged ones.
 * A failed submission (validation or network) leaves the form untouched
 * for retry; only a server acknowledgment advances.
 */
export class ReviewSession {
  readonly lang: string;
  readonly reviewerId: string;
  private readonly client: ReviewApiClient;
  private tasks: ReviewTask[] = [];
  private readonly judged = new Set<string>();
  private activeForm: TaskForm | null = null;
  lastError: string | null = null;

  constructor(client: ReviewApiClient, lang: string, reviewerId: string) {
    this.client = client;
    this.lang = lang;
    this.reviewerId = reviewerId;
  }

  async load(): Promise<void> {
    this.tasks = await this.client.listTasks(this.lang);
    this.activeForm = null;
  }

  get taskCount(): number {
    return this.tasks.length;
  }

  get judgedCount(): number {
    return this.judged.size;
  }

  /** The first unjudged task, or null when the session is finished. */
  currentTask(): ReviewTask | null {
    for (const task of this.tasks) {
      if (!this.judged.has(task.task_id)) return task;
    }
    return null;
  }

  /** The form for the current task, created lazily and kept across retries. */
  form(): TaskForm | null {
    const task = this.currentTask();
    if (task === null) return null;
    if (this.activeForm === null || this.activeForm.task.task_id !== task.task_id) {
      this.activeForm = new TaskForm(task);
    }
    return this.activeForm;
  }

  /**
   * Submit the current form. On acknowledgment the task is marked judged
   * and the session advances; on any failure the form state is preserved
   * and the error text is surfaced via lastError.
   */
  async submit(): Promise<JudgmentAck> {
    const form = this.form();
    if (form === null) throw new Error("no task pending");
    const judgment = form.buildJudgment(this.reviewerId);
    try {
      const ack = await this.client.submitJudgment(judgment);
      this.judged.add(form.task.task_id);
      this.activeForm = null;
      this.lastError = null;
      return ack;
    } catch (err) {
      this.lastError = err instanceof ApiError ? err.detail : String(err);
      throw err;
    }
  }
}
