/**
 * Minimal CSV reader for header pickers and previews: comma delimiter,
 * optional double-quote quoting, LF/CRLF. The heavy validation lives in
 * the service; this only needs headers, row counts and preview rows.
 */

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {
  constructor(message: string, readonly row: number | null = null) {
    super(row === null ? message : `${message} (row ${row})`);
  }
}

function splitRecords(text: string): string[][] {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  const src = text.replace(/\r\n/g, "\n");
  for (let i = 0; i < src.length; i++) {
    const ch = src[i];
    if (inQuotes) {
      if (ch === '"') {
        if (src[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          inQuotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      inQuotes = true;
    } else if (ch === ",") {
      record.push(field);
      field = "";
    } else if (ch === "\n") {
      record.push(field);
      records.push(record);
      record = [];
      field = "";
    } else {
      field += ch;
    }
  }
  if (inQuotes) {
    throw new CsvError("unterminated quoted field", records.length + 1);
  }
  if (field !== "" || record.length > 0) {
    record.push(field);
    records.push(record);
  }
  return records;
}

export function parseCsv(text: string): CsvTable {
  const records = splitRecords(text.replace(/^﻿/, ""));
  if (records.length === 0) {
    throw new CsvError("missing header row");
  }
  const header = records[0].map((c) => c.trim());
  const rows: string[][] = [];
  for (let i = 1; i < records.length; i++) {
    const cells = records[i];
    if (cells.length === 1 && cells[0] === "") continue; // trailing blank line
    if (cells.length !== header.length) {
      throw new CsvError(
        `row has ${cells.length} cells, header has ${header.length}`,
        i,
      );
    }
    rows.push(cells);
  }
  return { header, rows };
}
