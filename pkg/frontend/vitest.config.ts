import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["test/**/*.test.ts"],
    environment: "node",
    testTimeout: 30_000,
    // first run generates the shared test stream and boots a real server
    hookTimeout: 240_000,
  },
});
