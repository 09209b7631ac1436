import { describe, expect, it } from "vitest";

import { CsvError, parseCsv } from "../src/csv";
import { fixture } from "./helpers";

describe("parseCsv", () => {
  it("reads headers and rows", () => {
    const t = parseCsv("a,b,c\n1,2,3\n4,5,6\n");
    expect(t.header).toEqual(["a", "b", "c"]);
    expect(t.rows).toHaveLength(2);
    expect(t.rows[1]).toEqual(["4", "5", "6"]);
  });

  it("handles quoted fields with commas and escaped quotes", () => {
    const t = parseCsv('name,note\n"Bolivia, Plurinational",say ""hi""\n');
    expect(t.rows[0][0]).toBe("Bolivia, Plurinational");
    // double-double-quote unescaping applies inside quoted fields
    const t2 = parseCsv('a\n"x""y"\n');
    expect(t2.rows[0][0]).toBe('x"y');
  });

  it("accepts CRLF and a BOM", () => {
    const t = parseCsv("﻿a,b\r\n1,2\r\n");
    expect(t.header).toEqual(["a", "b"]);
    expect(t.rows).toEqual([["1", "2"]]);
  });

  it("reports arity mismatches with the row number", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrowError(/row 1/);
    try {
      parseCsv("a,b\n1,2\n3\n");
    } catch (err) {
      expect(err).toBeInstanceOf(CsvError);
      expect((err as CsvError).row).toBe(2);
    }
  });

  it("rejects unterminated quotes", () => {
    expect(() => parseCsv('a\n"unclosed\n')).toThrowError(/unterminated/);
  });

  it("parses the banana sample headers", () => {
    const project = JSON.parse(fixture("banana.project.json"));
    const nodes = parseCsv(project.datasets.nodes_csv);
    expect(nodes.header).toEqual(
      ["Country", "X", "Y", "Country_ID", "Total_Flow_Tons (Imports-Exports)"]);
    expect(nodes.rows).toHaveLength(9);
    const flows = parseCsv(project.datasets.flows_csv);
    expect(flows.rows).toHaveLength(11);
  });
});
