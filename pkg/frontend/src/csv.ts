/** Parsing of the benchmark CSV schema: method,rep,t,consensus_error[,mse]. */

export interface BenchRecord {
  method: string;
  rep: number;
  t: number;
  consensusError: number;
  mse: number | null;
}

export class CsvSchemaError extends Error {}

const BASE_COLUMNS = ['method', 'rep', 't', 'consensus_error'];

/** Parse CSV text, validating the header column by column. */
export function parseRecords(text: string): BenchRecord[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError('empty file: expected a header row');
  }
  const header = lines[0].split(',');
  for (let i = 0; i < BASE_COLUMNS.length; i++) {
    if (header[i] !== BASE_COLUMNS[i]) {
      throw new CsvSchemaError(
        `unexpected column ${i + 1}: got ${JSON.stringify(header[i] ?? '')}, expected "${BASE_COLUMNS[i]}"`,
      );
    }
  }
  let withMse = false;
  if (header.length === BASE_COLUMNS.length + 1) {
    if (header[BASE_COLUMNS.length] !== 'mse') {
      throw new CsvSchemaError(
        `unexpected column ${BASE_COLUMNS.length + 1}: got ${JSON.stringify(header[BASE_COLUMNS.length])}, expected "mse"`,
      );
    }
    withMse = true;
  } else if (header.length !== BASE_COLUMNS.length) {
    throw new CsvSchemaError(`unexpected extra columns after "${header[4]}"`);
  }

  const records: BenchRecord[] = [];
  for (let ln = 1; ln < lines.length; ln++) {
    const parts = lines[ln].split(',');
    if (parts.length < BASE_COLUMNS.length) {
      throw new CsvSchemaError(`row ${ln + 1}: expected at least 4 fields, got ${parts.length}`);
    }
    const rep = Number(parts[1]);
    const t = Number(parts[2]);
    const err = Number(parts[3]);
    if (!Number.isInteger(rep)) {
      throw new CsvSchemaError(`row ${ln + 1}: column "rep" is not an integer: ${parts[1]}`);
    }
    if (!Number.isInteger(t)) {
      throw new CsvSchemaError(`row ${ln + 1}: column "t" is not an integer: ${parts[2]}`);
    }
    if (!Number.isFinite(err)) {
      throw new CsvSchemaError(`row ${ln + 1}: column "consensus_error" is not a number: ${parts[3]}`);
    }
    let mse: number | null = null;
    if (withMse && parts.length > 4 && parts[4] !== '') {
      mse = Number(parts[4]);
      if (!Number.isFinite(mse)) {
        throw new CsvSchemaError(`row ${ln + 1}: column "mse" is not a number: ${parts[4]}`);
      }
    }
    records.push({ method: parts[0], rep, t, consensusError: err, mse });
  }
  return records;
}
