/**
 * End-to-end client tests against a real service process: a tiny reward
 * model is trained through the CLI, `qreward serve` is spawned on an
 * ephemeral port, and every assertion runs over genuine HTTP.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { RewardClient, ServiceError } from "../src/index.js";

const SEED = "9";

interface Sample {
  id: string;
  question: string;
  answer: string;
  reference_answer?: string;
}

let serviceProcess: ChildProcess;
let baseUrl: string;
let fixtures: Sample[];

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      const port = address.port;
      probe.close(() => resolve(port));
    });
  });
}

async function waitForHealth(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const response = await fetch(`${url}/healthz`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error(`service at ${url} never came up`);
    await new Promise((r) => setTimeout(r, 100));
  }
}

beforeAll(async () => {
  const workdir = mkdtempSync(join(tmpdir(), "qreward-client-"));
  const run = (...args: string[]) =>
    execFileSync("qreward", ["--seed", SEED, ...args], { cwd: workdir });

  run("synth", "--out", "corpus.jsonl", "--n", "20");
  run("build-oracle", "--fixtures", "corpus.jsonl", "--out", "train.jsonl");
  run("train", "--data", "train.jsonl", "--out", "model.json", "--epochs", "2");

  fixtures = readFileSync(join(workdir, "corpus.jsonl"), "utf-8")
    .split("\n")
    .filter(Boolean)
    .map((line) => JSON.parse(line) as Sample)
    .filter((sample) => sample.id.startsWith("fx-"));
  expect(fixtures.length).toBe(2);

  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  serviceProcess = spawn(
    "qreward",
    ["--seed", SEED, "serve", "--model", join(workdir, "model.json"),
     "--host", "127.0.0.1", "--port", String(port)],
    { stdio: "ignore" },
  );
  await waitForHealth(baseUrl, 60_000);
});

afterAll(() => {
  serviceProcess?.kill("SIGTERM");
});

async function directTotal(question: string, answer: string): Promise<number> {
  const response = await fetch(`${baseUrl}/v1/score`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ question, answer }),
  });
  expect(response.status).toBe(200);
  const body = (await response.json()) as { total: number };
  return body.total;
}

describe("RewardClient.scoreBatch", () => {
  it("matches direct HTTP totals on the canonical fixtures within 1e-12", async () => {
    const client = new RewardClient({ baseUrl });
    const pairs = fixtures.map(
      (sample) => [sample.question, sample.answer] as const,
    );
    const viaClient = await client.scoreBatch(pairs);
    expect(viaClient).toHaveLength(2);
    for (let i = 0; i < pairs.length; i++) {
      const direct = await directTotal(pairs[i]![0], pairs[i]![1]);
      expect(Math.abs(viaClient[i]! - direct)).toBeLessThanOrEqual(1e-12);
    }
  });

  it("preserves order on shuffled batches", async () => {
    const client = new RewardClient({ baseUrl, concurrency: 4 });
    const distinct: Array<readonly [string, string]> = [
      ["q", "@claim{kind=unitary_evolution, m=[[1,0],[0,1]]}"],
      ["q", "@claim{kind=unitary_evolution, m=[[1.1,0],[0,1.1]]}"],
      ["q", "@claim{kind=probabilities, values=[0.5,0.5]}"],
      ["q", "plain prose with no claims"],
      ["q", ""],
      ["q", "@claim{kind=energy, value=0, n=0, system=bound_state}"],
    ];
    const byAnswer = new Map<string, number>();
    const baseline = await client.scoreBatch(distinct);
    distinct.forEach((pair, i) => byAnswer.set(pair[1], baseline[i]!));

    for (const order of [[5, 3, 1, 0, 4, 2], [2, 4, 0, 1, 5, 3]]) {
      const shuffled = order.map((i) => distinct[i]!);
      const totals = await client.scoreBatch(shuffled);
      totals.forEach((total, position) => {
        expect(total).toBe(byAnswer.get(shuffled[position]![1]));
      });
    }
  });

  it("returns an empty list for an empty batch", async () => {
    const client = new RewardClient({ baseUrl });
    expect(await client.scoreBatch([])).toEqual([]);
  });

  it("raises ServiceError with attempt count when the server is unreachable", async () => {
    const dead = new RewardClient({
      baseUrl: "http://127.0.0.1:9",
      retries: 2,
      retryBaseMs: 10,
      timeoutMs: 500,
    });
    const failure = await dead.scoreBatch([["q", "a"]]).catch((e) => e);
    expect(failure).toBeInstanceOf(ServiceError);
    expect((failure as ServiceError).attempts).toBe(3);
  });

  it("does not retry client errors", async () => {
    const client = new RewardClient({ baseUrl, retries: 3 });
    const failure = await client
      .bestOfN("q", [])
      .catch((e) => e as ServiceError);
    expect(failure).toBeInstanceOf(ServiceError);
    expect((failure as ServiceError).status).toBe(400);
    expect((failure as ServiceError).attempts).toBe(1);
  });
});

describe("asRewardFn", () => {
  it("preserves length and order", async () => {
    const rewardFn = new RewardClient({ baseUrl }).asRewardFn();
    const prompts = ["p1", "p2", "p3"];
    const completions = [
      "@claim{kind=probabilities, values=[0.5,0.5]}",
      "no claims here",
      "@claim{kind=unitary_evolution, m=[[1,0],[0,1]]}",
    ];
    const rewards = await rewardFn(prompts, completions);
    expect(rewards).toHaveLength(3);
    rewards.forEach((r) => expect(typeof r).toBe("number"));
  });

  it("is deterministic across calls", async () => {
    const rewardFn = new RewardClient({ baseUrl }).asRewardFn();
    const prompts = ["p1", "p2"];
    const completions = ["@claim{kind=probabilities, values=[0.25,0.75]}", "text"];
    const first = await rewardFn(prompts, completions);
    const second = await rewardFn(prompts, completions);
    expect(second).toEqual(first);
  });

  it("matches service-side breakdown totals", async () => {
    const rewardFn = new RewardClient({ baseUrl }).asRewardFn();
    const prompts = fixtures.map((sample) => sample.question);
    const completions = fixtures.map((sample) => sample.answer);
    const rewards = await rewardFn(prompts, completions);
    for (let i = 0; i < prompts.length; i++) {
      const direct = await directTotal(prompts[i]!, completions[i]!);
      expect(Math.abs(rewards[i]! - direct)).toBeLessThanOrEqual(1e-12);
    }
  });

  it("rejects mismatched lengths", () => {
    const rewardFn = new RewardClient({ baseUrl }).asRewardFn();
    expect(() => rewardFn(["p1", "p2"], ["c1"])).toThrow(ServiceError);
  });
});

describe("other endpoints", () => {
  it("verify reports the zero-point violation", async () => {
    const client = new RewardClient({ baseUrl });
    const result = await client.verify(
      "@claim{kind=energy, value=0, n=0, system=bound_state}",
    );
    expect(result.v).toEqual({ Corr: 0, Phys: -1, Inst: 0 });
    const failing = result.reports.filter((r) => r.status === -1);
    expect(failing.map((r) => r.check)).toEqual(["P7"]);
  });

  it("bestOfN picks the valid candidate", async () => {
    const client = new RewardClient({ baseUrl });
    const result = await client.bestOfN("which is unitary?", [
      "@claim{kind=unitary_evolution, m=[[1.1,0],[0,1.1]]}",
      "@claim{kind=unitary_evolution, m=[[1,0],[0,1]]}",
    ]);
    expect(result.selected).toBe(1);
    expect(result.breakdowns).toHaveLength(2);
  });

  it("health exposes the model hash", async () => {
    const client = new RewardClient({ baseUrl });
    const health = await client.health();
    expect(health.status).toBe("ok");
    expect(health.model_hash).toMatch(/^[0-9a-f]{64}$/);
  });

  it("reads the base URL from the environment", async () => {
    process.env.QREWARD_URL = baseUrl;
    try {
      const client = new RewardClient();
      const health = await client.health();
      expect(health.status).toBe("ok");
    } finally {
      delete process.env.QREWARD_URL;
    }
  });

  it("requires a base URL from somewhere", () => {
    delete process.env.QREWARD_URL;
    expect(() => new RewardClient()).toThrow(ServiceError);
  });
});
