// Boots the real backend for UI tests: seeds a store with the admin CLI,
// then runs `serve` as a child process and waits for its listen line.

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface ServiceHandle {
  baseUrl: string;
  adminToken: string;
  annotatorToken: string;
  annotatorId: string;
  jobIds: string[];
  stop(): void;
}

export const TABLE_ORIGINAL = "My husband and I enjoy LA Hilton Hotel.";

const LM_CORPUS = [
  "my husband and i love la hilton hotel .",
  "my husband and i love the hotel .",
  "we love hotels in los angeles .",
  "the dessert is yummy !",
].join("\n");

const CLASSIFIER_CORPUS = [
  "F\tmy husband and i enjoy la hilton hotel .",
  "F\tthe dessert is yummy !",
  "M\tmy wife and i love the hotel .",
  "M\twe enjoy hotels in la .",
].join("\n");

const EMBED_WORDS = (
  "my husband wife and i we enjoy love la hilton hotel hotels family " +
  "members all in los angeles the . ! yummy dessert is"
).split(" ");

function cli(args: string[]): string {
  return execFileSync("python3", ["-m", "redline.cli", ...args], {
    encoding: "utf-8",
  });
}

function seededVectors(): string {
  // small deterministic LCG so vectors are stable across runs
  let seed = 1234567;
  const next = () => {
    seed = (seed * 1103515245 + 12345) % 2147483648;
    return seed / 2147483648 - 0.5;
  };
  return (
    EMBED_WORDS.map(
      (word) =>
        `${word} ${Array.from({ length: 8 }, () => next().toFixed(6)).join(" ")}`,
    ).join("\n") + "\n"
  );
}

export async function startService(): Promise<ServiceHandle> {
  const dir = mkdtempSync(join(tmpdir(), "redline-ui-"));
  const store = join(dir, "store");
  writeFileSync(join(dir, "vectors.txt"), seededVectors());
  writeFileSync(join(dir, "lm_corpus.txt"), LM_CORPUS + "\n");
  writeFileSync(join(dir, "clf_corpus.tsv"), CLASSIFIER_CORPUS + "\n");
  writeFileSync(join(dir, "sentences.txt"), `${TABLE_ORIGINAL}\nThe dessert is yummy !\n`);

  cli(["user", "create", "--store", store, "--name", "Root",
    "--role", "administrator", "--id", "admin", "--user-token", "admintok"]);
  cli(["user", "create", "--store", store, "--name", "Alice",
    "--id", "alice", "--user-token", "alicetok"]);
  cli(["task", "create", "--store", store, "--title", "hotels",
    "--sentences", join(dir, "sentences.txt"),
    "--providers", "ed,wmd,ppl,class,entropy",
    "--labels", "F,M", "--target-label", "F", "--id", "hotels"]);
  const assigned = cli(["assign", "--store", store, "--task", "hotels", "--users", "alice"]);
  if (!assigned.includes("created 2 jobs")) {
    throw new Error(`unexpected assign output: ${assigned}`);
  }

  writeFileSync(
    join(dir, "service.conf"),
    [
      "listen = 127.0.0.1:0",
      `store = ${store}`,
      `embeddings = ${join(dir, "vectors.txt")}`,
      `lm_corpus = ${join(dir, "lm_corpus.txt")}`,
      "lm_order = 2",
      `classifier_corpus = ${join(dir, "clf_corpus.tsv")}`,
      "providers = ed,wmd,ppl,class,entropy",
      "recommend_k = 5",
      "",
    ].join("\n"),
  );

  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "redline.cli", "serve", "--config", join(dir, "service.conf")],
    { stdio: ["ignore", "ignore", "pipe"] },
  );

  const baseUrl = await new Promise<string>((resolve, reject) => {
    let stderr = "";
    const timer = setTimeout(
      () => reject(new Error(`service did not start: ${stderr}`)),
      20000,
    );
    proc.stderr?.on("data", (chunk: Buffer) => {
      stderr += chunk.toString();
      const match = stderr.match(/listening on ([\d.]+):(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(`http://${match[1]}:${match[2]}`);
      }
    });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited early (${code}): ${stderr}`));
    });
  });

  return {
    baseUrl,
    adminToken: "admintok",
    annotatorToken: "alicetok",
    annotatorId: "alice",
    jobIds: ["hotels.0.alice", "hotels.1.alice"],
    stop() {
      proc.kill("SIGINT");
    },
  };
}

/** Poll until a condition returns a truthy value (scripted-browser style). */
export async function waitFor<T>(
  probe: () => T | null | undefined | false,
  timeoutMs = 10000,
  what = "condition",
): Promise<T> {
  const start = Date.now();
  for (;;) {
    const value = probe();
    if (value) return value;
    if (Date.now() - start > timeoutMs) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 15));
  }
}

export async function apiFetch(
  baseUrl: string,
  token: string,
  method: string,
  path: string,
  body?: unknown,
): Promise<any> {
  const response = await fetch(baseUrl + path, {
    method,
    headers: {
      Authorization: `Bearer ${token}`,
      ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
    },
    body: body !== undefined ? JSON.stringify(body) : undefined,
  });
  const payload = await response.json();
  if (!response.ok) {
    throw new Error(`${method} ${path} -> ${response.status}: ${JSON.stringify(payload)}`);
  }
  return payload;
}
