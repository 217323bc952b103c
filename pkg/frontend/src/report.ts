/**
 * Report view model. The frontend never aggregates judgments itself: the
 * cells below are the server's numbers stringified unchanged, so the view
 * always matches GET /api/report on the same snapshot.
 */

import type { ReportRow } from "./types";

export const REPORT_COLUMNS: readonly { key: keyof ReportRow; label: string }[] = [
  { key: "language", label: "language" },
  { key: "sentences_reviewed", label: "# sentences" },
  { key: "sentences_meaning_ok", label: "meaning ok" },
  { key: "entities_total", label: "# entities" },
  { key: "entities_transferred_ok", label: "transferred" },
  { key: "entities_translation_ok", label: "translation ok" },
  { key: "entities_boundary_ok", label: "boundary ok" },
];

/** The row's display cells, in column order, values passed through as-is. */
export function reportCells(row: ReportRow): string[] {
  return REPORT_COLUMNS.map(({ key }) => String(row[key]));
}
