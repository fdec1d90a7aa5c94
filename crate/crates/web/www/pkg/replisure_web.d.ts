/* tslint:disable */
/* eslint-disable */

/**
 * Assessment, power and combined interval for a user-entered pair of
 * hazard ratios with 95% intervals. A margin of 1 means superiority.
 */
export function assess(margin_hr: number, rct_hr: number, rct_lo: number, rct_hi: number, rwe_hr: number, rwe_lo: number, rwe_hi: number, alpha: number): string;

/**
 * Comparison curves of the sceptical and two-trials p-values against the
 * relative sample size, as a table in JSON.
 */
export function curves(p_original: number, rel_effect: number, c_min: number, c_max: number, points: number): string;

/**
 * Power profile of a bundled study. A non-positive or NaN `c` means the
 * study's own variance ratio.
 */
export function powerProfile(label: string, c: number, alpha: number, points: number): string;

/**
 * Labels of the bundled study pairs, as a JSON array.
 */
export function studyLabels(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly assess: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly powerProfile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly studyLabels: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
