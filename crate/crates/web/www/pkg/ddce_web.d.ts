/* tslint:disable */
/* eslint-disable */

/**
 * Correlation magnitudes of one window setting at the first and the exit
 * iteration.
 */
export class CorrelationTrace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    first(): Float64Array;
    last(): Float64Array;
    readonly nmse: number;
    readonly signalColumns: number;
    readonly stopIteration: number;
}

export function compareEstimators(snr_db: number, roll_off_div: number, delay_bins: number, trials: number, seed: number): Float64Array;

export function correlationTrace(roll_off_div: number, snr_db: number, seed: number, rcos: boolean): CorrelationTrace;

export function windowWeights(pilot_len: number, roll_off: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_correlationtrace_free: (a: number, b: number) => void;
    readonly compareEstimators: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly correlationTrace: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly correlationtrace_first: (a: number) => [number, number];
    readonly correlationtrace_last: (a: number) => [number, number];
    readonly correlationtrace_nmse: (a: number) => number;
    readonly correlationtrace_signalColumns: (a: number) => number;
    readonly correlationtrace_stopIteration: (a: number) => number;
    readonly windowWeights: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
