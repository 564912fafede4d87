/**
 * Wire types for the JSON-lines episode server.
 *
 * Only flat numeric arrays and plain JSON objects cross the boundary.
 * Rewards travel twice: as floats (currency) and as exact micro-unit
 * integers for bit-stable comparisons.
 */

export interface ServerRequest {
    id: number
    op: "manifest" | "make" | "reset" | "step" | "close"
    task?: string
    split?: string
    seed?: number | null
    env?: number
    actions?: number[]
}

export interface ServerResponse<T> {
    id: number | null
    ok: boolean
    result?: T
    error?: string
}

export interface Manifest {
    engine_version: string
    protocol: number
    task_registry_hash: string
    observation_features: string[]
}

export interface ActionSpaceInfo {
    multipliers: number[]
    window: number
}

export interface MakeResult {
    env: number
    agents: number
    warehouses: number
    skus: number
    episode_steps: number
    observation_features: string[]
    action_space: ActionSpaceInfo
}

export interface ResetResult {
    observations: number[]
    shape: [number, number]
}

export interface StepResult {
    observations: number[]
    shape: [number, number]
    rewards: number[]
    rewards_micros: number[]
    done: boolean
    info: {
        t: number
        step_profit_micros: number
    }
}
