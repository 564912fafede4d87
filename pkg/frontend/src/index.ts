export { BoundEnv } from "./env.js";
export type { MakeOptions, Observation, StepOutcome } from "./env.js";
export { EnvServerError, EnvServerProcess } from "./client.js";
export type { ServerOptions } from "./client.js";
export type {
    ActionSpaceInfo,
    MakeResult,
    Manifest,
    ResetResult,
    StepResult,
} from "./protocol.js";
