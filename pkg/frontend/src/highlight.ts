/**
 * Span highlighting model: splits a sentence into runs of plain text and
 * entity text, each entity run carrying a deterministic color.
 *
 * Colors come from the eight-value Okabe-Ito palette (colorblind safe) and
 * are assigned as id mod palette size, so the same entity id gets the same
 * color in the source and translated panes.
 */

import type { WireEntity } from "./types";

export const PALETTE: readonly string[] = [
  "#E69F00",
  "#56B4E9",
  "#009E73",
  "#F0E442",
  "#0072B2",
  "#D55E00",
  "#CC79A7",
  "#999999",
];

export function colorForId(id: number): string {
  return PALETTE[id % PALETTE.length];
}

/** One run of text; entity runs carry the span's id, type, and color. */
export interface TextRun {
  text: string;
  entityId: number | null;
  entityType: string | null;
  color: string | null;
  /** Source pane only: the entity did not survive translation. */
  missing: boolean;
}

/**
 * Split `text` into runs covering it exactly, one run per entity plus one
 * per gap. Offsets are code points (the annotation convention), not UTF-16
 * units, so astral-plane characters count as one.
 */
export function segmentText(
  text: string,
  entities: WireEntity[],
  missingIds: Iterable<number> = [],
): TextRun[] {
  const chars = Array.from(text);
  const missing = new Set(missingIds);
  const ordered = [...entities].sort((a, b) => a.start - b.start);

  const runs: TextRun[] = [];
  let cursor = 0;
  const plain = (upto: number) => {
    if (upto > cursor) {
      runs.push({
        text: chars.slice(cursor, upto).join(""),
        entityId: null,
        entityType: null,
        color: null,
        missing: false,
      });
    }
  };
  for (const entity of ordered) {
    if (entity.start < cursor || entity.end > chars.length) {
      throw new Error(`entity ${entity.id} spans [${entity.start}, ${entity.end}) ` +
        `outside or overlapping previous runs`);
    }
    plain(entity.start);
    runs.push({
      text: chars.slice(entity.start, entity.end).join(""),
      entityId: entity.id,
      entityType: entity.type,
      color: colorForId(entity.id),
      missing: missing.has(entity.id),
    });
    cursor = entity.end;
  }
  plain(chars.length);
  return runs;
}
