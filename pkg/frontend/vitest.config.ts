import { existsSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { defineConfig } from "vitest/config";

// Source files import each other with explicit ".js" extensions so the
// tsc output is directly loadable as browser ES modules; map those
// specifiers back to the ".ts" sources when running under vitest.
export default defineConfig({
  plugins: [
    {
      name: "resolve-ts-from-js-extension",
      enforce: "pre",
      resolveId(source, importer) {
        if (!importer || !source.endsWith(".js")) return null;
        if (!source.startsWith("./") && !source.startsWith("../")) return null;
        const candidate = resolve(dirname(importer), source.slice(0, -3) + ".ts");
        return existsSync(candidate) ? candidate : null;
      },
    },
  ],
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
  },
});
