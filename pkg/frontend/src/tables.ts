/** Parsing and cross-validation of the stats/std/config result tables.
 *
 * Tables are tab-separated with the fixed header
 * `Alg Vars Deg N AP AR AHP AHR McAdj McArrow E`. Cells hold numbers or the
 * sentinels '*' (undefined, division by zero) and '-' (missing, e.g. the run
 * timed out); sentinel cells are kept as-is and flagged non-plottable.
 */

export const STAT_NAMES = ["AP", "AR", "AHP", "AHR", "McAdj", "McArrow", "E"] as const;
export type StatName = (typeof STAT_NAMES)[number];

export const HEADER = ["Alg", "Vars", "Deg", "N", ...STAT_NAMES];

export type Cell = number | "*" | "-";

export interface StatsRow {
  alg: number;
  vars: number;
  deg: number;
  n: number;
  stats: Record<StatName, Cell>;
}

export interface StatsTable {
  rows: StatsRow[];
}

export interface AlgorithmInfo {
  id: number;
  name: string;
  params: Record<string, string>;
  /** e.g. "pc alpha=0.001 conflict=priority" */
  label: string;
}

export interface ConfigManifest {
  runs: number;
  varsLevels: number[];
  degLevels: number[];
  nLevels: number[];
  algorithms: AlgorithmInfo[];
}

/** Parse failure that names the file and 1-based line for the user. */
export class TableFormatError extends Error {
  constructor(public file: string, public line: number, detail: string) {
    super(`${file}:${line}: ${detail}`);
  }
}

export const plottable = (cell: Cell): cell is number => typeof cell === "number";

const parseCell = (raw: string, file: string, line: number): Cell => {
  if (raw === "*" || raw === "-") return raw;
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new TableFormatError(file, line, `expected a number or sentinel, got "${raw}"`);
  }
  return value;
};

export function parseStatsTable(text: string, file = "stats.txt"): StatsTable {
  const lines = text.split("\n");
  if (lines[0]?.split("\t").join(" ") !== HEADER.join(" ")) {
    throw new TableFormatError(file, 1, `header must be "${HEADER.join(" ")}"`);
  }
  const rows: StatsRow[] = [];
  const seen = new Set<string>();
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (!line.trim()) continue;
    const parts = line.split("\t");
    if (parts.length !== HEADER.length) {
      throw new TableFormatError(file, i + 1, `expected ${HEADER.length} columns, got ${parts.length}`);
    }
    const ints = parts.slice(0, 4).map((p) => Number(p));
    if (ints.some((v) => !Number.isInteger(v))) {
      throw new TableFormatError(file, i + 1, "Alg/Vars/Deg/N must be integers");
    }
    const [alg, vars, deg, n] = ints;
    const key = `${alg}|${vars}|${deg}|${n}`;
    if (seen.has(key)) throw new TableFormatError(file, i + 1, `duplicate key ${key}`);
    seen.add(key);
    const stats = {} as Record<StatName, Cell>;
    STAT_NAMES.forEach((name, k) => {
      stats[name] = parseCell(parts[4 + k], file, i + 1);
    });
    rows.push({ alg, vars, deg, n, stats });
  }
  return { rows };
}

export function parseConfig(text: string, file = "config.txt"): ConfigManifest {
  const manifest: ConfigManifest = {
    runs: 0,
    varsLevels: [],
    degLevels: [],
    nLevels: [],
    algorithms: [],
  };
  const lines = text.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (!line.trim()) continue;
    const parts = line.split("\t");
    const kind = parts[0];
    const levelTarget: Record<string, number[]> = {
      vars: manifest.varsLevels,
      deg: manifest.degLevels,
      n: manifest.nLevels,
    };
    if (kind === "runs") {
      manifest.runs = Number(parts[1]);
      if (!Number.isInteger(manifest.runs) || manifest.runs < 1) {
        throw new TableFormatError(file, i + 1, `bad runs count "${parts[1]}"`);
      }
    } else if (kind in levelTarget) {
      for (const piece of (parts[1] ?? "").split(",")) {
        if (!piece) continue;
        const value = Number(piece);
        if (!Number.isInteger(value)) {
          throw new TableFormatError(file, i + 1, `bad ${kind} level "${piece}"`);
        }
        levelTarget[kind].push(value);
      }
    } else if (kind === "alg") {
      const id = Number(parts[1]);
      const name = parts[2];
      if (!Number.isInteger(id) || !name) {
        throw new TableFormatError(file, i + 1, "malformed algorithm record");
      }
      const params: Record<string, string> = {};
      for (const piece of parts.slice(3)) {
        const eq = piece.indexOf("=");
        if (eq < 1) throw new TableFormatError(file, i + 1, `malformed parameter "${piece}"`);
        params[piece.slice(0, eq)] = piece.slice(eq + 1);
      }
      const label = [name, ...Object.keys(params).sort().map((k) => `${k}=${params[k]}`)].join(" ");
      manifest.algorithms.push({ id, name, params, label });
    } else {
      throw new TableFormatError(file, i + 1, `unknown record kind "${kind}"`);
    }
  }
  return manifest;
}

export interface LoadedTables {
  stats: StatsTable;
  /** Standard deviations, same shape as stats; absent disables intervals. */
  std: StatsTable | null;
  config: ConfigManifest;
}

/** Parse the three files and cross-validate every stats row against the
 * manifest: unknown algorithm ids or factor levels are rejected with the
 * offending row named. std.txt is optional (means still plot without CIs). */
export function loadTables(
  statsText: string,
  configText: string,
  stdText?: string | null
): LoadedTables {
  const config = parseConfig(configText);
  const stats = parseStatsTable(statsText, "stats.txt");
  const ids = new Set(config.algorithms.map((a) => a.id));
  stats.rows.forEach((row, i) => {
    if (!ids.has(row.alg)) {
      throw new TableFormatError("stats.txt", i + 2, `unknown algorithm id ${row.alg}`);
    }
    if (!config.varsLevels.includes(row.vars)) {
      throw new TableFormatError("stats.txt", i + 2, `vars level ${row.vars} not in config`);
    }
    if (!config.degLevels.includes(row.deg)) {
      throw new TableFormatError("stats.txt", i + 2, `deg level ${row.deg} not in config`);
    }
    if (!config.nLevels.includes(row.n)) {
      throw new TableFormatError("stats.txt", i + 2, `n level ${row.n} not in config`);
    }
  });
  let std: StatsTable | null = null;
  if (stdText != null && stdText.trim() !== "") {
    std = parseStatsTable(stdText, "std.txt");
    const statKeys = stats.rows.map((r) => `${r.alg}|${r.vars}|${r.deg}|${r.n}`).sort();
    const stdKeys = std.rows.map((r) => `${r.alg}|${r.vars}|${r.deg}|${r.n}`).sort();
    if (statKeys.join(";") !== stdKeys.join(";")) {
      throw new TableFormatError("std.txt", 1, "row keys do not match stats.txt");
    }
  }
  return { stats, std, config };
}

export interface Selection {
  vars: number[];
  deg: number[];
  n: number[];
  algIds: number[];
  stats: StatName[];
  runs: number;
}

export interface SelectedCell {
  vars: number;
  deg: number;
  n: number;
  /** per algorithm id, in selection order */
  rows: StatsRow[];
  stdRows: (StatsRow | null)[];
}

const findRow = (table: StatsTable, alg: number, vars: number, deg: number, n: number) =>
  table.rows.find((r) => r.alg === alg && r.vars === vars && r.deg === deg && r.n === n) ?? null;

/** Resolve a selection into renderable cells. Charts render only when every
 * chosen (vars, deg, n, algorithm) combination exists in the loaded table;
 * otherwise the missing combination is reported. */
export function resolveSelection(
  tables: LoadedTables,
  selection: Selection
): { cells: SelectedCell[]; missing: string[] } {
  const cells: SelectedCell[] = [];
  const missing: string[] = [];
  for (const vars of selection.vars) {
    for (const deg of selection.deg) {
      for (const n of selection.n) {
        const rows: StatsRow[] = [];
        const stdRows: (StatsRow | null)[] = [];
        for (const alg of selection.algIds) {
          const row = findRow(tables.stats, alg, vars, deg, n);
          if (row === null) {
            missing.push(`alg ${alg} at vars=${vars} deg=${deg} n=${n}`);
            continue;
          }
          rows.push(row);
          stdRows.push(tables.std ? findRow(tables.std, alg, vars, deg, n) : null);
        }
        if (rows.length === selection.algIds.length) {
          cells.push({ vars, deg, n, rows, stdRows });
        }
      }
    }
  }
  return { cells, missing };
}
