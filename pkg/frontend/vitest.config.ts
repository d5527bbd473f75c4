import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'jsdom',
    include: ['test/**/*.test.ts'],
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // the e2e test spawns one real backend server; keep workers serial
    pool: 'forks',
    poolOptions: { forks: { singleFork: true } },
  },
});
