/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_sliceview_free: (a: number, b: number) => void;
export const kernel_curve: (a: number, b: number) => [number, number, number, number];
export const radial_curve: (a: number, b: number, c: number) => [number, number, number, number];
export const sliceview_bounds: (a: number) => [number, number];
export const sliceview_contours: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const sliceview_field: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const sliceview_midway_level: (a: number) => number;
export const sliceview_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const sliceview_ses_level: (a: number) => number;
export const sliceview_spacing: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
