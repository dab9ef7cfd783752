/* tslint:disable */
/* eslint-disable */

/**
 * Qubit frequency and coupling against flux difference, as JSON columns.
 */
export function flux_sweep(e_j0_ghz: number, b_parallel: number, points: number): string;

/**
 * Wigner function after two kicks a quarter period apart, as JSON.
 */
export function protocol_wigner(kick: number, nbar: number, points: number): string;

/**
 * Readout probability over free-rotation angle and readout kick, as JSON.
 */
export function readout_map(kick: number, nbar: number, n_added: number, theta_points: number, ratio_points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly flux_sweep: (a: number, b: number, c: number) => [number, number, number, number];
    readonly protocol_wigner: (a: number, b: number, c: number) => [number, number, number, number];
    readonly readout_map: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
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
