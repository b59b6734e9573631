#!/usr/bin/env python3
"""Writes the hand-written real-simulator smoke problems as problem files with
injected candidates (labelled correct or buggy) and injected test cases."""
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent

ADDER_IF = "module top_module(\n  input [3:0] a,\n  input [3:0] b,\n  output [4:0] sum\n);"
MUX_IF = ("module top_module(\n  input [1:0] sel,\n  input [7:0] d0,\n  input [7:0] d1,\n"
          "  input [7:0] d2,\n  input [7:0] d3,\n  output reg [7:0] out\n);")
COUNTER_IF = ("module top_module(\n  input clk,\n  input reset,\n  input en,\n"
              "  output reg [3:0] q\n);")

PROBLEMS = [
    {
        "id": "smoke_adder4",
        "spec_text": "Add the 4-bit unsigned inputs a and b; sum is the 5-bit result including the carry.",
        "module_interface": ADDER_IF,
        "candidates": [
            (True, ADDER_IF + "\n  assign sum = a + b;\nendmodule\n"),
            (True, ADDER_IF + "\n  assign sum = {1'b0, a} + {1'b0, b};\nendmodule\n"),
            (False, ADDER_IF + "\n  assign sum = a ^ b;\nendmodule\n"),
            (True, "module top_module(\n  input [3:0] a,\n  input [3:0] b,\n  output reg [4:0] sum\n);\n"
                   "  always @(*) sum = a + b;\nendmodule\n"),
            (False, ADDER_IF + "\n  assign sum = a + ;\nendmodule\n"),
            (True, ADDER_IF + "\n  wire [4:0] wa = a;\n  wire [4:0] wb = b;\n  assign sum = wa + wb;\nendmodule\n"),
        ],
        "test_cases": [
            {"description": "small", "stimulus": "a = 4'd1; b = 4'd2;"},
            {"description": "carry out", "stimulus": "a = 4'd15; b = 4'd1;"},
            {"description": "both high", "stimulus": "a = 4'd12; b = 4'd12;"},
            {"description": "zero", "stimulus": "a = 4'd0; b = 4'd0;"},
            {"description": "mixed", "stimulus": "a = 4'd7; b = 4'd9;"},
        ],
    },
    {
        "id": "smoke_mux4",
        "spec_text": "Select one of four 8-bit inputs: out = d0, d1, d2 or d3 for sel = 0, 1, 2, 3.",
        "module_interface": MUX_IF,
        "candidates": [
            (True, MUX_IF + "\n  always @(*) begin\n    case (sel)\n      2'd0: out = d0;\n      2'd1: out = d1;\n"
                            "      2'd2: out = d2;\n      default: out = d3;\n    endcase\n  end\nendmodule\n"),
            (False, MUX_IF + "\n  always @(*) begin\n    case ({sel[0], sel[1]})\n      2'd0: out = d0;\n"
                             "      2'd1: out = d1;\n      2'd2: out = d2;\n      default: out = d3;\n    endcase\n"
                             "  end\nendmodule\n"),
            (True, MUX_IF + "\n  always @(*) out = sel[1] ? (sel[0] ? d3 : d2) : (sel[0] ? d1 : d0);\nendmodule\n"),
            (True, MUX_IF + "\n  wire [7:0] table_[0:3];\n  assign table_[0] = d0;\n  assign table_[1] = d1;\n"
                            "  assign table_[2] = d2;\n  assign table_[3] = d3;\n  always @(*) out = table_[sel];\n"
                            "endmodule\n"),
            (False, MUX_IF + "\n  always @(*) out = sel[1] ? d2 : d0;\nendmodule\n"),
            (True, MUX_IF + "\n  always @(*) begin\n    if (sel == 2'd0) out = d0;\n    else if (sel == 2'd1) out = d1;\n"
                            "    else if (sel == 2'd2) out = d2;\n    else out = d3;\n  end\nendmodule\n"),
        ],
        "test_cases": [
            {"description": "sel 0", "stimulus": "d0 = 8'h11; d1 = 8'h22; d2 = 8'h33; d3 = 8'h44; sel = 2'd0;"},
            {"description": "sel 1", "stimulus": "d0 = 8'h11; d1 = 8'h22; d2 = 8'h33; d3 = 8'h44; sel = 2'd1;"},
            {"description": "sel 2", "stimulus": "d0 = 8'h11; d1 = 8'h22; d2 = 8'h33; d3 = 8'h44; sel = 2'd2;"},
            {"description": "sel 3", "stimulus": "d0 = 8'h11; d1 = 8'h22; d2 = 8'h33; d3 = 8'h44; sel = 2'd3;"},
            {"description": "new data", "stimulus": "d0 = 8'ha5; d1 = 8'h5a; d2 = 8'hff; d3 = 8'h00; sel = 2'd1;"},
        ],
    },
    {
        "id": "smoke_counter",
        "spec_text": ("4-bit counter with synchronous active-high reset to 0. On each rising clock edge, "
                      "when en is high the counter increments, wrapping from 15 to 0."),
        "module_interface": COUNTER_IF,
        "candidates": [
            (True, COUNTER_IF + "\n  always @(posedge clk) begin\n    if (reset) q <= 4'd0;\n"
                                "    else if (en) q <= q + 4'd1;\n  end\nendmodule\n"),
            (True, COUNTER_IF + "\n  always @(posedge clk)\n    q <= reset ? 4'd0 : (en ? q + 1'b1 : q);\nendmodule\n"),
            (False, COUNTER_IF + "\n  always @(posedge clk) begin\n    if (reset) q <= 4'd0;\n"
                                 "    else q <= q + 4'd1;\n  end\nendmodule\n"),
            (True, COUNTER_IF + "\n  wire [3:0] next = q + 4'd1;\n  always @(posedge clk) begin\n"
                                "    if (reset) q <= 4'd0;\n    else if (en) q <= next;\n  end\nendmodule\n"),
            (False, COUNTER_IF + "\n  always @(posedge clk) begin\n    if (reset) q <= 4'd0;\n"
                                 "    else if (en) q <= q + 4'd2;\n  end\nendmodule\n"),
            (True, COUNTER_IF + "\n  always @(posedge clk) begin\n    case ({reset, en})\n"
                                "      2'b10, 2'b11: q <= 4'd0;\n      2'b01: q <= q + 4'd1;\n"
                                "      default: q <= q;\n    endcase\n  end\nendmodule\n"),
        ],
        "test_cases": [
            {"description": "reset", "stimulus": "reset = 1'b1; en = 1'b0;\n@(posedge clk); #1;\nreset = 1'b0;"},
            {"description": "hold while disabled", "stimulus": "en = 1'b0;\nrepeat (2) @(posedge clk); #1;"},
            {"description": "count three", "stimulus": "en = 1'b1;\nrepeat (3) @(posedge clk); #1;\nen = 1'b0;"},
            {"description": "wrap", "stimulus": "en = 1'b1;\nrepeat (14) @(posedge clk); #1;\nen = 1'b0;"},
            {"description": "reset again", "stimulus": "reset = 1'b1;\n@(posedge clk); #1;\nreset = 1'b0;"},
        ],
    },
]


def main():
    for p in PROBLEMS:
        doc = dict(p)
        doc["candidates"] = [{"source": src, "correct": ok} for ok, src in p["candidates"]]
        (HERE / (p["id"] + ".json")).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
