/* tslint:disable */
/* eslint-disable */

export function analyze_graph(graph_json: string, action_json: string): string;

export function analyze_instance(instance_json: string): string;

/**
 * Decomposition of `w` plus the lift restricted to the window of the given
 * radius, for drawing.
 */
export function decompose_periodic(pgraph_json: string, w_json: string, radius: number): string;

/**
 * Fixture documents as pretty JSON strings keyed by role.
 */
export function fixture(name: string): string;

export function fixture_names(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze_graph: (a: number, b: number, c: number, d: number) => [number, number];
    readonly analyze_instance: (a: number, b: number) => [number, number];
    readonly decompose_periodic: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly fixture: (a: number, b: number) => [number, number];
    readonly fixture_names: () => [number, number];
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
