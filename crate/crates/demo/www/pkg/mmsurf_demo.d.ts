/* tslint:disable */
/* eslint-disable */

/**
 * An evolved density held for repeated slicing.
 */
export class SliceView {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `[x0, y0, z0, x1, y1, z1]` of the grid box in Å.
     */
    bounds(): Float64Array;
    contours(axis: string, coordinate: number, level: number): Float64Array;
    /**
     * Density sampled on a `width × width` raster across the slice plane,
     * rows along the second in-plane axis.
     */
    field(axis: string, coordinate: number, width: number): Float64Array;
    constructor(molecule: string, points: number, time: number);
    spacing(): number;
    readonly midway_level: number;
    readonly ses_level: number;
}

export function kernel_curve(time: number, half_width: number): Float64Array;

export function radial_curve(atom_radius: number, probe_radius: number, spread: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_sliceview_free: (a: number, b: number) => void;
    readonly kernel_curve: (a: number, b: number) => [number, number, number, number];
    readonly radial_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly sliceview_bounds: (a: number) => [number, number];
    readonly sliceview_contours: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly sliceview_field: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly sliceview_midway_level: (a: number) => number;
    readonly sliceview_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly sliceview_ses_level: (a: number) => number;
    readonly sliceview_spacing: (a: number) => number;
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
