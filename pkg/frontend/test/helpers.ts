import { execFile } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

export const repoRoot = path.resolve(
    path.dirname(fileURLToPath(import.meta.url)), "..", "..");

export const python = process.env.STOCKBENCH_PYTHON ?? "python3";

export function scratchDir(prefix: string): string {
    return mkdtempSync(path.join(tmpdir(), prefix));
}

export interface FixtureSpec {
    name: string
    echelons: number
    sku_count: number
    horizon: number
    warmup: number
    transforms?: Record<string, unknown>
}

export function writeSpecFile(dir: string, spec: FixtureSpec): string {
    const file = path.join(dir, `${spec.name}.json`);
    writeFileSync(file, JSON.stringify(spec, null, 2));
    return file;
}

/** Deterministic PRNG so the scripted actions match on both sides. */
export function lcg(seed: number): () => number {
    let state = seed >>> 0;
    return () => {
        state = (state * 1664525 + 1013904223) >>> 0;
        return state;
    };
}

export function scriptedActions(seed: number, steps: number, agents: number,
                                actionCount: number): number[][] {
    const next = lcg(seed);
    const rows: number[][] = [];
    for (let t = 0; t < steps; t++) {
        const row: number[] = [];
        for (let a = 0; a < agents; a++) {
            row.push(next() % actionCount);
        }
        rows.push(row);
    }
    return rows;
}

export function writeActionCsv(dir: string, actions: number[][],
                               warehouses: number, skus: number): string {
    const lines = ["step,warehouse,sku,action"];
    actions.forEach((row, t) => {
        for (let i = 0; i < warehouses; i++) {
            for (let j = 0; j < skus; j++) {
                lines.push(`${t},${i},${j},${row[i * skus + j]}`);
            }
        }
    });
    const file = path.join(dir, "actions.csv");
    writeFileSync(file, lines.join("\n") + "\n");
    return file;
}

export interface NativeStreams {
    observations: number[][][]
    rewards_micros: number[][]
}

/** Run the native harness with a scripted action stream, dumping streams. */
export async function nativeRun(taskFile: string, seed: number, actionsFile: string,
                                streamsFile: string): Promise<NativeStreams> {
    await execFileAsync(python, [
        "-m", "stockbench.cli", "run",
        "--task", taskFile,
        "--policy", `external:${actionsFile}`,
        "--split", "test",
        "--seed", String(seed),
        "--streams", streamsFile,
    ], { cwd: repoRoot, maxBuffer: 1 << 28 });
    const { readFileSync } = await import("node:fs");
    return JSON.parse(readFileSync(streamsFile, "utf-8")) as NativeStreams;
}
