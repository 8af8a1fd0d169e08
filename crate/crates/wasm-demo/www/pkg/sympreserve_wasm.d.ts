/* tslint:disable */
/* eslint-disable */

/**
 * Generates an operator (`congruence`, `hadamard` or `sum`) and classifies it.
 */
export function classifyGenerated(kind: string, n: number, h_rank: number, seed: number, samples: number): string;

/**
 * Singular PSD `A` with `A ∘ (x xᵗ + y yᵗ)` positive definite.
 */
export function rankDeficientWitness(x: string, y: string): string;

/**
 * Entrywise product of two symmetric matrices in the text format, with inertias.
 */
export function schurProduct(a: string, b: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly classifyGenerated: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly rankDeficientWitness: (a: number, b: number, c: number, d: number) => [number, number];
    readonly schurProduct: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
