/**
 * JSON-lines subprocess transport.
 *
 * Spawns the Python episode server (`python3 -m stockbench.env_server`) and
 * matches line-delimited responses to pending requests by id. Killing the
 * process releases everything the server held; nothing native outlives it.
 */

import { ChildProcessByStdio, spawn } from "node:child_process";
import { createInterface, Interface } from "node:readline";
import type { Readable, Writable } from "node:stream";

import { ServerRequest, ServerResponse } from "./protocol.js";

export interface ServerOptions {
    /** Python executable; defaults to $STOCKBENCH_PYTHON or "python3". */
    python?: string
    /** Working directory for the server process. */
    cwd?: string
}

export class EnvServerError extends Error {}

export class EnvServerProcess {
    private proc: ChildProcessByStdio<Writable, Readable, null>;
    private lines: Interface;
    private nextId = 1;
    private pending = new Map<number, {
        resolve: (value: unknown) => void
        reject: (err: Error) => void
    }>();
    private closed = false;

    constructor(options: ServerOptions = {}) {
        const python = options.python ?? process.env.STOCKBENCH_PYTHON ?? "python3";
        this.proc = spawn(python, ["-m", "stockbench.env_server"], {
            cwd: options.cwd,
            stdio: ["pipe", "pipe", "inherit"],
        });
        this.lines = createInterface({ input: this.proc.stdout });
        this.lines.on("line", (line) => this.dispatch(line));
        this.proc.on("exit", () => this.failPending("env server exited"));
        this.proc.on("error", (err) => this.failPending(String(err)));
    }

    private dispatch(line: string): void {
        let response: ServerResponse<unknown>;
        try {
            response = JSON.parse(line);
        } catch {
            return; // stray non-protocol output
        }
        const waiter = response.id === null ? undefined : this.pending.get(response.id);
        if (!waiter) {
            return;
        }
        this.pending.delete(response.id as number);
        if (response.ok) {
            waiter.resolve(response.result);
        } else {
            waiter.reject(new EnvServerError(response.error ?? "unknown server error"));
        }
    }

    private failPending(reason: string): void {
        for (const waiter of this.pending.values()) {
            waiter.reject(new EnvServerError(reason));
        }
        this.pending.clear();
    }

    request<T>(op: ServerRequest["op"], fields: Partial<ServerRequest> = {}): Promise<T> {
        if (this.closed) {
            return Promise.reject(new EnvServerError("client closed"));
        }
        const id = this.nextId++;
        const request: ServerRequest = { id, op, ...fields };
        return new Promise<T>((resolve, reject) => {
            this.pending.set(id, { resolve: resolve as (v: unknown) => void, reject });
            this.proc.stdin.write(JSON.stringify(request) + "\n");
        });
    }

    close(): void {
        if (this.closed) {
            return;
        }
        this.closed = true;
        this.lines.close();
        this.proc.stdin.end();
        this.proc.kill();
        this.failPending("client closed");
    }
}
