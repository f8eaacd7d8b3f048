import { ApiClient } from "./api.js";
import { GraphRenderer } from "./render.js";
import { ViewState } from "./state.js";
import type { GraphMode } from "./types.js";

const api = new ApiClient();
const state = new ViewState(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>("graph");
const sidebar = el<HTMLElement>("components");
const bannerBox = el<HTMLElement>("banners");
const detailPanel = el<HTMLElement>("detail");
const searchInput = el<HTMLInputElement>("search");
const searchResults = el<HTMLElement>("search-results");
const modeToggle = el<HTMLInputElement>("mode-toggle");

const renderer = new GraphRenderer(canvas, state);

function resizeCanvas(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  renderer.relayout();
  renderer.draw();
}

function renderSidebar(): void {
  sidebar.replaceChildren();
  if (state.componentTotal === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = "no components";
    sidebar.append(empty);
    return;
  }
  for (const entry of state.componentList) {
    const row = document.createElement("button");
    row.className = "component-row";
    row.textContent = `#${entry.id} · ${entry.size} tokens · ${state.labelFor(entry.representative)}`;
    row.addEventListener("click", () => {
      void state.loadComponent(entry.id).then(() => {
        renderer.relayout();
      });
    });
    sidebar.append(row);
  }
}

function renderBanners(): void {
  bannerBox.replaceChildren();
  state.banners.forEach((banner, index) => {
    const div = document.createElement("div");
    div.className = `banner ${banner.kind}`;
    div.textContent = banner.message;
    const close = document.createElement("button");
    close.textContent = "×";
    close.addEventListener("click", () => state.dismissBanner(index));
    div.append(close);
    bannerBox.append(div);
  });
}

function renderDetail(): void {
  const d = state.tokenDetail;
  if (!d) {
    detailPanel.textContent = "select a token";
    return;
  }
  const meta = d.metadata;
  detailPanel.replaceChildren();
  const lines = [
    `${d.label ?? d.address}`,
    `address: ${d.address}`,
    `in-degree ${d.in_degree} · out-degree ${d.out_degree}`,
    meta
      ? `cap $${meta.market_cap_usd ?? "—"} · ${meta.pool_count} pools · ${meta.snapshot_date}`
      : "no snapshot metadata",
  ];
  for (const text of lines) {
    const p = document.createElement("p");
    p.textContent = text;
    detailPanel.append(p);
  }
}

state.onChange(() => {
  renderSidebar();
  renderBanners();
  renderDetail();
  renderer.draw();
});

// --- canvas interaction: select, expand, pan, zoom -----------------------

let dragging = false;
let lastX = 0;
let lastY = 0;

canvas.addEventListener("mousedown", (ev) => {
  dragging = true;
  lastX = ev.offsetX;
  lastY = ev.offsetY;
});

canvas.addEventListener("mousemove", (ev) => {
  if (!dragging) return;
  renderer.view.panX += ev.offsetX - lastX;
  renderer.view.panY += ev.offsetY - lastY;
  lastX = ev.offsetX;
  lastY = ev.offsetY;
  renderer.draw();
});

window.addEventListener("mouseup", () => {
  dragging = false;
});

canvas.addEventListener("click", (ev) => {
  const hit = renderer.pick({ x: ev.offsetX, y: ev.offsetY });
  if (hit) {
    void state.select(hit);
  }
});

canvas.addEventListener("dblclick", (ev) => {
  const hit = renderer.pick({ x: ev.offsetX, y: ev.offsetY });
  if (hit) {
    void state.expand(hit, 1).then(() => {
      renderer.relayout();
      renderer.draw();
    });
  }
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const factor = ev.deltaY < 0 ? 1.1 : 1 / 1.1;
  const next = Math.min(Math.max(renderer.view.zoom * factor, 0.2), 8);
  // zoom around the cursor
  renderer.view.panX = ev.offsetX - ((ev.offsetX - renderer.view.panX) / renderer.view.zoom) * next;
  renderer.view.panY = ev.offsetY - ((ev.offsetY - renderer.view.panY) / renderer.view.zoom) * next;
  renderer.view.zoom = next;
  renderer.draw();
});

// --- top bar -------------------------------------------------------------

modeToggle.addEventListener("change", () => {
  const mode: GraphMode = modeToggle.checked ? "filtered" : "unfiltered";
  void state.setMode(mode);
});

let searchTimer: ReturnType<typeof setTimeout> | undefined;
searchInput.addEventListener("input", () => {
  clearTimeout(searchTimer);
  searchTimer = setTimeout(async () => {
    const q = searchInput.value.trim();
    searchResults.replaceChildren();
    if (!q) return;
    const { results } = await api.search(q);
    for (const hit of results) {
      const row = document.createElement("button");
      row.className = "search-hit";
      row.textContent = hit.label ? `${hit.label} (${hit.address.slice(0, 8)})` : hit.address;
      row.addEventListener("click", () => {
        searchResults.replaceChildren();
        void state.expand(hit.address, 1).then(() => {
          renderer.relayout();
          void state.select(hit.address);
        });
      });
      searchResults.append(row);
    }
  }, 150);
});

window.addEventListener("resize", resizeCanvas);

resizeCanvas();
void state.refreshComponents();
