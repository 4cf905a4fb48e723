import { defineConfig } from "vite";

export default defineConfig({
  build: {
    // The bundle server owns /assets/* for site media; the viewer's own
    // build artifacts must live elsewhere.
    assetsDir: "static",
    chunkSizeWarningLimit: 1800,
  },
});
