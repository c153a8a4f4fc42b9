import { defineConfig } from "vite";

export default defineConfig({
  build: { outDir: "dist" },
  server: {
    proxy: {
      // during development the Python service runs separately
      "^/(scenario|occupancy|disruption|optimize|runs|commit|flights)": "http://127.0.0.1:8000",
    },
  },
  test: {
    include: ["test/**/*.test.ts"],
    environment: "node",
  },
});
