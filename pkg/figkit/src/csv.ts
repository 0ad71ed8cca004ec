/** Strict reader for the laboratory's plain CSV artifacts. */

export class SchemaError extends Error {}

export interface Table {
  header: string[];
  columns: Map<string, number[]>;
  rows: number;
}

/** Parse a headered numeric CSV; empty cells become NaN. */
export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new SchemaError("CSV has no data rows");
  }
  const header = lines[0].split(",");
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `row ${i} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    for (let j = 0; j < header.length; j++) {
      const cell = cells[j];
      columns.get(header[j])!.push(cell === "" ? NaN : Number(cell));
    }
  }
  return { header, columns, rows: lines.length - 1 };
}

/** Fetch a required column by name; the error names the missing column. */
export function column(table: Table, name: string): number[] {
  const col = table.columns.get(name);
  if (col === undefined) {
    throw new SchemaError(`missing column: ${name}`);
  }
  return col;
}

/** Columns matching a prefix-and-index family like x_1..x_m, in order. */
export function columnFamily(table: Table, prefix: string): number[][] {
  const names = table.header
    .filter((h) => h.startsWith(prefix))
    .sort((a, b) => Number(a.slice(prefix.length)) - Number(b.slice(prefix.length)));
  if (names.length === 0) {
    throw new SchemaError(`missing column family: ${prefix}*`);
  }
  return names.map((n) => table.columns.get(n)!);
}
