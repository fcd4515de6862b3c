/**
 * Thin client for the qreward HTTP reward service.
 *
 * Transport only: no reward math happens client-side, so the service suite
 * stays authoritative. All calls are idempotent reads of a stateless
 * scoring API; batch calls fan out concurrently up to a cap and reassemble
 * in input order.
 */

const DEFAULT_TIMEOUT_MS = 30_000;
const DEFAULT_RETRIES = 3;
const DEFAULT_RETRY_BASE_MS = 200;
const DEFAULT_CONCURRENCY = 8;

export const BASE_URL_ENV = "QREWARD_URL";

export interface RewardClientOptions {
  /** Service base URL; falls back to the QREWARD_URL environment variable. */
  baseUrl?: string;
  timeoutMs?: number;
  /** Retry attempts after the first try, on network errors / 429 / 5xx. */
  retries?: number;
  retryBaseMs?: number;
  /** Optional static bearer token. */
  token?: string;
  /** Client-side fan-out cap for batch calls. */
  concurrency?: number;
  /** Value for the X-Seed header, making responses reproducible. */
  seed?: number;
}

export interface DimensionMap {
  Corr: number;
  Phys: number;
  Inst: number;
}

export interface CheckReport {
  check: string;
  status: -1 | 0 | 1;
  message: string;
  residual: number | null;
}

export interface RewardBreakdown {
  schema: string;
  mode: "vrm" | "passthrough";
  v: DimensionMap;
  s: DimensionMap;
  lambda: DimensionMap;
  fused: DimensionMap;
  weights: DimensionMap;
  contributions: DimensionMap;
  total: number;
  checks: CheckReport[];
}

export interface BestOfNResult {
  selected: number;
  breakdowns: RewardBreakdown[];
}

export interface VerifyResult {
  v: DimensionMap;
  reports: CheckReport[];
  unparsable: boolean;
  claims: number;
}

export interface HealthResult {
  status: string;
  version: string;
  model_hash: string;
  feature_version: string;
  mode: string;
}

export interface ScoreExtras {
  reference?: string;
  task_type?: string;
}

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number | null,
    readonly attempts: number,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

const RETRYABLE_STATUS = new Set([429, 500, 502, 503, 504]);

export class RewardClient {
  private readonly baseUrl: string;
  private readonly timeoutMs: number;
  private readonly retries: number;
  private readonly retryBaseMs: number;
  private readonly token?: string;
  private readonly concurrency: number;
  private readonly seed?: number;

  constructor(options: RewardClientOptions = {}) {
    const baseUrl = options.baseUrl ?? process.env[BASE_URL_ENV];
    if (!baseUrl) {
      throw new ServiceError(
        `no base URL: pass baseUrl or set ${BASE_URL_ENV}`,
        null,
        0,
      );
    }
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.timeoutMs = options.timeoutMs ?? DEFAULT_TIMEOUT_MS;
    this.retries = options.retries ?? DEFAULT_RETRIES;
    this.retryBaseMs = options.retryBaseMs ?? DEFAULT_RETRY_BASE_MS;
    this.token = options.token;
    this.concurrency = Math.max(1, options.concurrency ?? DEFAULT_CONCURRENCY);
    this.seed = options.seed;
  }

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = { accept: "application/json" };
    if (body !== undefined) headers["content-type"] = "application/json";
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    if (this.seed !== undefined) headers["x-seed"] = String(this.seed);

    let attempt = 0;
    for (;;) {
      attempt += 1;
      let response: Response;
      try {
        response = await fetch(this.baseUrl + path, {
          method,
          headers,
          body: body === undefined ? undefined : JSON.stringify(body),
          signal: AbortSignal.timeout(this.timeoutMs),
        });
      } catch (cause) {
        if (attempt > this.retries) {
          throw new ServiceError(
            `request to ${path} failed after ${attempt} attempt(s): ${String(cause)}`,
            null,
            attempt,
          );
        }
        await sleep(this.retryBaseMs * 2 ** (attempt - 1));
        continue;
      }
      if (response.ok) {
        return (await response.json()) as T;
      }
      if (RETRYABLE_STATUS.has(response.status) && attempt <= this.retries) {
        await sleep(this.retryBaseMs * 2 ** (attempt - 1));
        continue;
      }
      const detail = await response.text().catch(() => "");
      throw new ServiceError(
        `HTTP ${response.status} from ${path}: ${detail.slice(0, 200)}`,
        response.status,
        attempt,
      );
    }
  }

  /** Full reward breakdown for one (question, answer) pair. */
  score(
    question: string,
    answer: string,
    extras: ScoreExtras = {},
  ): Promise<RewardBreakdown> {
    return this.request<RewardBreakdown>("POST", "/v1/score", {
      question,
      answer,
      ...extras,
    });
  }

  /**
   * Total reward per pair, order preserved. Requests fan out concurrently
   * up to the configured cap; element i always corresponds to pairs[i].
   */
  async scoreBatch(
    pairs: ReadonlyArray<readonly [string, string]>,
    extras: ScoreExtras = {},
  ): Promise<number[]> {
    const totals = new Array<number>(pairs.length);
    let next = 0;
    const worker = async (): Promise<void> => {
      for (;;) {
        const index = next++;
        if (index >= pairs.length) return;
        const pair = pairs[index]!;
        const breakdown = await this.score(pair[0], pair[1], extras);
        totals[index] = breakdown.total;
      }
    };
    const workers = Array.from(
      { length: Math.min(this.concurrency, Math.max(pairs.length, 1)) },
      () => worker(),
    );
    await Promise.all(workers);
    return totals;
  }

  /** Best-of-N: the service picks argmax reward, ties to the lowest index. */
  bestOfN(
    question: string,
    candidates: string[],
    extras: ScoreExtras = {},
  ): Promise<BestOfNResult> {
    return this.request<BestOfNResult>("POST", "/v1/bon", {
      question,
      candidates,
      ...extras,
    });
  }

  /** Deterministic checks only (no judge, no fusion). */
  verify(
    answer: string,
    question = "",
    extras: ScoreExtras = {},
  ): Promise<VerifyResult> {
    return this.request<VerifyResult>("POST", "/v1/verify", {
      question,
      answer,
      ...extras,
    });
  }

  health(): Promise<HealthResult> {
    return this.request<HealthResult>("GET", "/healthz");
  }

  /**
   * Adapter with the (prompts, completions) -> rewards shape policy
   * optimizers expect. Pure passthrough over scoreBatch: list length and
   * order are preserved.
   */
  asRewardFn(
    extras: ScoreExtras = {},
  ): (prompts: string[], completions: string[]) => Promise<number[]> {
    return (prompts, completions) => {
      if (prompts.length !== completions.length) {
        throw new ServiceError(
          `prompts (${prompts.length}) and completions (${completions.length}) differ in length`,
          null,
          0,
        );
      }
      const pairs = prompts.map(
        (prompt, i) => [prompt, completions[i]!] as const,
      );
      return this.scoreBatch(pairs, extras);
    };
  }
}
