// Trial history table: rows straight from protocol messages, a stable
// sort, and per-(role, generation) footer means that must agree with the
// server's trial_stats to 2 decimals.

import type { StatsGroup, TrialRow } from "./protocol.js";

export type SortKey = "trial" | "role" | "generation" | "time";

export interface FooterRow {
  role: string;
  generation: number;
  count: number;
  mean: number;
}

export function sortRows(
  rows: TrialRow[],
  key: SortKey,
  ascending = true,
): TrialRow[] {
  const sorted = rows
    .map((row, index) => ({ row, index }))
    .sort((a, b) => {
      const va = a.row[key];
      const vb = b.row[key];
      let cmp = 0;
      if (va < vb) cmp = -1;
      else if (va > vb) cmp = 1;
      if (cmp === 0) cmp = a.index - b.index; // stable
      return ascending ? cmp : -cmp;
    });
  return sorted.map((s) => s.row);
}

export function footerMeans(rows: TrialRow[]): FooterRow[] {
  const groups = new Map<string, { times: number[]; role: string; generation: number }>();
  for (const row of rows) {
    const key = `${row.role}/${row.generation}`;
    let g = groups.get(key);
    if (!g) {
      g = { times: [], role: row.role, generation: row.generation };
      groups.set(key, g);
    }
    g.times.push(row.time);
  }
  const out: FooterRow[] = [];
  for (const g of groups.values()) {
    const mean = g.times.reduce((a, b) => a + b, 0) / g.times.length;
    out.push({
      role: g.role,
      generation: g.generation,
      count: g.times.length,
      mean,
    });
  }
  out.sort((a, b) =>
    a.role === b.role ? a.generation - b.generation : a.role < b.role ? -1 : 1,
  );
  return out;
}

export function formatTime(t: number): string {
  return t.toFixed(2);
}

// true when every local footer mean matches the server group to 2 decimals
export function meansMatchServer(
  rows: TrialRow[],
  serverGroups: StatsGroup[],
): boolean {
  const local = footerMeans(rows);
  if (local.length !== serverGroups.length) return false;
  for (const mine of local) {
    const server = serverGroups.find(
      (g) => g.role === mine.role && g.generation === mine.generation,
    );
    if (!server || server.count !== mine.count) return false;
    if (formatTime(server.mean) !== formatTime(mine.mean)) return false;
  }
  return true;
}
