/** Hand-built task fixtures shared by the unit tests. */

import type { ReviewTask, WireEntity } from "../src/types";

export function entity(id: number, start: number, end: number, type = "misc"): WireEntity {
  return { id, start, end, type };
}

/**
 * A task whose translated pane recovered every source entity except those
 * in `missing`. Texts and offsets are placeholders; only the entity id
 * bookkeeping matters to the form logic.
 */
export function makeTask(
  taskId: string,
  sourceEntities: WireEntity[],
  missing: number[] = [],
  lang = "de",
): ReviewTask {
  const kept = sourceEntities.filter((e) => !missing.includes(e.id));
  return {
    task_id: taskId,
    language: lang,
    sentence_id: taskId.split(":")[1] ?? taskId,
    source: { text: "x".repeat(64), entities: sourceEntities },
    translated: { text: "y".repeat(64), entities: kept },
    aligned_ids: kept.map((e) => e.id),
    missing_ids: missing.slice().sort((a, b) => a - b),
  };
}

/** Three entities at distinct offsets, ids 0..2. */
export function threeEntities(): WireEntity[] {
  return [entity(0, 0, 4, "person"), entity(1, 8, 12, "location"), entity(2, 16, 20, "misc")];
}
