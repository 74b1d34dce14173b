/* tslint:disable */
/* eslint-disable */

export class DecisionView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    accept: boolean;
    boundary: boolean;
    h: number;
}

/**
 * JS handle on a model built from slider values.
 */
export class WebExplorer {
    free(): void;
    [Symbol.dispose](): void;
    curve(n: number): Float64Array;
    decide(price: number, guess?: number | null): DecisionView;
    constructor(x_min: number, x_max: number, low_alpha: number, low_beta: number, high_alpha: number, high_beta: number, background_alpha: number, background_beta: number, gamma: number);
    surface(kind: string, n: number): Float64Array;
    /**
     * `NaN` when `h` keeps one sign.
     */
    threshold(): number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_decisionview_free: (a: number, b: number) => void;
    readonly __wbg_get_decisionview_accept: (a: number) => number;
    readonly __wbg_get_decisionview_boundary: (a: number) => number;
    readonly __wbg_get_decisionview_h: (a: number) => number;
    readonly __wbg_set_decisionview_accept: (a: number, b: number) => void;
    readonly __wbg_set_decisionview_boundary: (a: number, b: number) => void;
    readonly __wbg_set_decisionview_h: (a: number, b: number) => void;
    readonly __wbg_webexplorer_free: (a: number, b: number) => void;
    readonly webexplorer_curve: (a: number, b: number) => [number, number, number, number];
    readonly webexplorer_decide: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly webexplorer_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly webexplorer_surface: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly webexplorer_threshold: (a: number) => [number, number, number];
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
