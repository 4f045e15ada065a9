/**
 * Reader for the simulation harness regret CSVs.
 *
 * The schema is fixed: `checkpoint_t,mean_regret,stderr_regret,mean_multisub,lower_bound`,
 * one row per checkpoint, floats at full precision, and an empty
 * lower_bound field when the instance admits no regret floor. Anything
 * else is a schema mismatch and a hard error — the plotting layer never
 * guesses at data.
 */

export const EXPECTED_HEADER =
  "checkpoint_t,mean_regret,stderr_regret,mean_multisub,lower_bound";

export interface RegretRow {
  checkpoint: number;
  meanRegret: number;
  stderrRegret: number;
  meanMultisub: number;
  lowerBound: number | null;
}

export interface RegretTable {
  rows: RegretRow[];
  hasLowerBound: boolean;
}

function parseFloatStrict(field: string, line: number, name: string): number {
  const value = Number(field);
  if (field.trim() === "" || !Number.isFinite(value)) {
    throw new Error(`row ${line}: ${name} is not a finite number: "${field}"`);
  }
  return value;
}

export function parseRegretCsv(text: string, source = "<csv>"): RegretTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`${source}: empty file`);
  }
  if (lines[0] !== EXPECTED_HEADER) {
    throw new Error(
      `${source}: schema mismatch: expected header "${EXPECTED_HEADER}", got "${lines[0]}"`,
    );
  }
  const rows: RegretRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== 5) {
      throw new Error(`${source}: row ${i}: expected 5 fields, got ${fields.length}`);
    }
    rows.push({
      checkpoint: parseFloatStrict(fields[0], i, "checkpoint_t"),
      meanRegret: parseFloatStrict(fields[1], i, "mean_regret"),
      stderrRegret: parseFloatStrict(fields[2], i, "stderr_regret"),
      meanMultisub: parseFloatStrict(fields[3], i, "mean_multisub"),
      lowerBound: fields[4] === "" ? null : parseFloatStrict(fields[4], i, "lower_bound"),
    });
  }
  if (rows.length === 0) {
    throw new Error(`${source}: no data rows`);
  }
  return { rows, hasLowerBound: rows.every((r) => r.lowerBound !== null) };
}
