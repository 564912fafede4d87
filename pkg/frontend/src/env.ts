/**
 * BoundEnv - the conventional reset/step environment interface over the
 * stockbench episode server.
 *
 * One agent per (warehouse, SKU) cell, warehouse-major. Observations come
 * back as a flat Float64 row-major matrix (agents x features); actions are
 * integer indices into the multiplier table reported by the action space.
 */

import { EnvServerError, EnvServerProcess, ServerOptions } from "./client.js";
import {
    ActionSpaceInfo,
    MakeResult,
    Manifest,
    ResetResult,
    StepResult,
} from "./protocol.js";

export interface Observation {
    /** Flat row-major matrix data. */
    data: Float64Array
    /** [agents, features] */
    shape: [number, number]
}

export interface StepOutcome {
    observation: Observation
    /** Per-agent reward in currency units. */
    rewards: number[]
    /** Per-agent reward in exact 1e-6 currency integers. */
    rewardsMicros: number[]
    done: boolean
    info: { t: number; stepProfitMicros: number }
}

export interface MakeOptions extends ServerOptions {
    split?: "train" | "val" | "validation" | "test"
    seed?: number | null
}

function toObservation(payload: ResetResult | StepResult): Observation {
    return {
        data: Float64Array.from(payload.observations),
        shape: payload.shape,
    };
}

export class BoundEnv {
    private server: EnvServerProcess;
    private handle: number;
    private open = true;

    readonly agents: number;
    readonly warehouses: number;
    readonly skus: number;
    readonly episodeSteps: number;
    readonly featureManifest: readonly string[];
    readonly actionSpace: Readonly<ActionSpaceInfo>;

    private constructor(server: EnvServerProcess, made: MakeResult) {
        this.server = server;
        this.handle = made.env;
        this.agents = made.agents;
        this.warehouses = made.warehouses;
        this.skus = made.skus;
        this.episodeSteps = made.episode_steps;
        this.featureManifest = made.observation_features;
        this.actionSpace = made.action_space;
    }

    /** Spawn a server and build one episode environment on it. */
    static async make(task: string, options: MakeOptions = {}): Promise<BoundEnv> {
        const server = new EnvServerProcess(options);
        try {
            const made = await server.request<MakeResult>("make", {
                task,
                split: options.split ?? "test",
                seed: options.seed ?? null,
            });
            return new BoundEnv(server, made);
        } catch (err) {
            server.close();
            throw err;
        }
    }

    /** Engine version and task-registry hash of the connected server. */
    async manifest(): Promise<Manifest> {
        this.ensureOpen();
        return this.server.request<Manifest>("manifest");
    }

    async reset(): Promise<Observation> {
        this.ensureOpen();
        const result = await this.server.request<ResetResult>("reset", { env: this.handle });
        return toObservation(result);
    }

    async step(actions: ArrayLike<number>): Promise<StepOutcome> {
        this.ensureOpen();
        if (actions.length !== this.agents) {
            throw new EnvServerError(
                `need ${this.agents} actions, got ${actions.length}`);
        }
        const result = await this.server.request<StepResult>("step", {
            env: this.handle,
            actions: Array.from(actions),
        });
        return {
            observation: toObservation(result),
            rewards: result.rewards,
            rewardsMicros: result.rewards_micros,
            done: result.done,
            info: { t: result.info.t, stepProfitMicros: result.info.step_profit_micros },
        };
    }

    /** Terminates the server process; the handle is invalid afterwards. */
    close(): void {
        if (this.open) {
            this.open = false;
            this.server.close();
        }
    }

    private ensureOpen(): void {
        if (!this.open) {
            throw new EnvServerError("environment is closed");
        }
    }
}
