/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_decisionview_free: (a: number, b: number) => void;
export const __wbg_get_decisionview_accept: (a: number) => number;
export const __wbg_get_decisionview_boundary: (a: number) => number;
export const __wbg_get_decisionview_h: (a: number) => number;
export const __wbg_set_decisionview_accept: (a: number, b: number) => void;
export const __wbg_set_decisionview_boundary: (a: number, b: number) => void;
export const __wbg_set_decisionview_h: (a: number, b: number) => void;
export const __wbg_webexplorer_free: (a: number, b: number) => void;
export const webexplorer_curve: (a: number, b: number) => [number, number, number, number];
export const webexplorer_decide: (a: number, b: number, c: number, d: number) => [number, number, number];
export const webexplorer_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const webexplorer_surface: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const webexplorer_threshold: (a: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
