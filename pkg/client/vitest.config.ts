import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 60_000,
    hookTimeout: 180_000,
    // the suite spawns one shared service process
    pool: "forks",
    poolOptions: { forks: { singleFork: true } },
  },
});
