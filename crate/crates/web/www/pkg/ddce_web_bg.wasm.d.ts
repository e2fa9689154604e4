/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_correlationtrace_free: (a: number, b: number) => void;
export const compareEstimators: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const correlationTrace: (a: number, b: number, c: number, d: number) => [number, number, number];
export const correlationtrace_first: (a: number) => [number, number];
export const correlationtrace_last: (a: number) => [number, number];
export const correlationtrace_nmse: (a: number) => number;
export const correlationtrace_signalColumns: (a: number) => number;
export const correlationtrace_stopIteration: (a: number) => number;
export const windowWeights: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
