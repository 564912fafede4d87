import { describe, expect, it } from "vitest";

import { BoundEnv } from "../src/index.js";
import { repoRoot, scratchDir, writeSpecFile } from "./helpers.js";

const TIMEOUT = 120_000;

describe("BoundEnv over the episode server", () => {
    it("makes a registry task and reports 200 agents", { timeout: TIMEOUT }, async () => {
        const env = await BoundEnv.make("sku200.single_store.standard",
            { cwd: repoRoot, seed: 0 });
        try {
            expect(env.agents).toBe(200);
            expect(env.warehouses).toBe(1);
            expect(env.skus).toBe(200);
            expect(env.featureManifest).toContain("in_stock");
            expect(env.actionSpace.multipliers[0]).toBe(0);
            expect(env.actionSpace.window).toBe(21);
        } finally {
            env.close();
        }
    });

    it("surfaces the unknown-task error verbatim", { timeout: TIMEOUT }, async () => {
        await expect(
            BoundEnv.make("sku200.single_store.standar", { cwd: repoRoot }),
        ).rejects.toThrow(/nearest.*sku200\.single_store\.standard/);
    });

    it("two makes with the same args give equal initial observations",
        { timeout: TIMEOUT }, async () => {
            const dir = scratchDir("sb-env-");
            const spec = writeSpecFile(dir, {
                name: "twin", echelons: 1, sku_count: 4, horizon: 150, warmup: 15,
            });
            const a = await BoundEnv.make(spec, { cwd: repoRoot, seed: 5 });
            const b = await BoundEnv.make(spec, { cwd: repoRoot, seed: 5 });
            try {
                const obsA = await a.reset();
                const obsB = await b.reset();
                expect(obsA.shape).toEqual(obsB.shape);
                expect(Array.from(obsA.data)).toEqual(Array.from(obsB.data));
            } finally {
                a.close();
                b.close();
            }
        });

    it("steps to done exactly at the split end and rejects bad shapes",
        { timeout: TIMEOUT }, async () => {
            const dir = scratchDir("sb-env-");
            const spec = writeSpecFile(dir, {
                name: "done-check", echelons: 2, sku_count: 3, horizon: 150, warmup: 10,
            });
            const env = await BoundEnv.make(spec, { cwd: repoRoot, seed: 1 });
            try {
                await env.reset();
                await expect(env.step([0])).rejects.toThrow(/actions/);
                let done = false;
                let steps = 0;
                while (!done) {
                    const out = await env.step(new Array(env.agents).fill(1));
                    expect(out.rewards).toHaveLength(env.agents);
                    expect(out.rewardsMicros).toHaveLength(env.agents);
                    done = out.done;
                    steps += 1;
                }
                expect(steps).toBe(env.episodeSteps);
                await expect(env.step(new Array(env.agents).fill(0)))
                    .rejects.toThrow(/done/);
            } finally {
                env.close();
            }
        });

    it("reports a versioned manifest with a registry hash", { timeout: TIMEOUT }, async () => {
        const dir = scratchDir("sb-env-");
        const spec = writeSpecFile(dir, {
            name: "manifest-check", echelons: 1, sku_count: 2, horizon: 120, warmup: 5,
        });
        const env = await BoundEnv.make(spec, { cwd: repoRoot });
        try {
            const manifest = await env.manifest();
            expect(manifest.protocol).toBe(1);
            expect(manifest.engine_version).toMatch(/^\d+\.\d+\.\d+$/);
            expect(manifest.task_registry_hash).toMatch(/^[0-9a-f]{64}$/);
        } finally {
            env.close();
        }
    });

    it("close invalidates the handle", { timeout: TIMEOUT }, async () => {
        const dir = scratchDir("sb-env-");
        const spec = writeSpecFile(dir, {
            name: "close-check", echelons: 1, sku_count: 2, horizon: 120, warmup: 5,
        });
        const env = await BoundEnv.make(spec, { cwd: repoRoot });
        env.close();
        await expect(env.reset()).rejects.toThrow(/closed/);
    });
});
