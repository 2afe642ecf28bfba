// Browser entry point: wires the controller to the minimal portal page.

import { PortalApi } from "./api.js";
import { copyDoi } from "./clipboard.js";
import { PortalController } from "./portal.js";

const ARCHIVE_BASE = (window as { ARCHIVE_BASE?: string }).ARCHIVE_BASE ?? "http://127.0.0.1:8301";
const WORKFLOW_BASE = (window as { WORKFLOW_BASE?: string }).WORKFLOW_BASE ?? "http://127.0.0.1:8303";

const controller = new PortalController(new PortalApi(ARCHIVE_BASE, WORKFLOW_BASE));

function el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
}

function renderResults(): void {
    const tbody = el<HTMLTableSectionElement>("results-body");
    tbody.innerHTML = "";
    for (const row of controller.state.searchResults) {
        const tr = document.createElement("tr");
        tr.innerHTML =
            `<td><input type="checkbox" data-obs="${row.obs_id}"></td>` +
            `<td>${row.obs_id}</td><td>${row.mission}</td>` +
            `<td>${row.target_name}</td><td>${row.instrument}</td>`;
        tbody.appendChild(tr);
    }
}

function renderCart(): void {
    el("cart-count").textContent = String(controller.state.cart.items.length);
    el<HTMLButtonElement>("mint-button").disabled = !controller.mintEnabled();
    el("notice").textContent = controller.state.notice ?? "";
    el("error-banner").textContent = controller.state.errorBanner ?? "";
    const summary = controller.state.mintSummary;
    el("minted-doi").textContent = summary ? summary.doi : "";
    el("mint-summary").textContent = summary
        ? `${summary.title} — ${summary.observationCount} observations (${summary.state})`
        : "";
}

el("search-button").addEventListener("click", async () => {
    await controller.search({
        mission: el<HTMLInputElement>("filter-mission").value || undefined,
        target_name: el<HTMLInputElement>("filter-target").value || undefined,
        allRows: el<HTMLInputElement>("filter-all").checked,
        maxResults: 200,
    });
    renderResults();
    renderCart();
});

el("add-button").addEventListener("click", () => {
    const chosen = Array.from(
        document.querySelectorAll<HTMLInputElement>("input[data-obs]:checked"),
    ).map((input) => input.dataset.obs as string);
    controller.addResults(chosen);
    renderCart();
});

for (const field of ["title", "description", "creator", "affiliation"] as const) {
    el<HTMLInputElement>(`draft-${field}`).addEventListener("input", (event) => {
        controller.setDraft({ [field]: (event.target as HTMLInputElement).value });
        renderCart();
    });
}

el("mint-button").addEventListener("click", async () => {
    await controller.mintFromCart();
    renderCart();
});

el("copy-button").addEventListener("click", async () => {
    const doi = controller.state.mintSummary?.doi ?? controller.state.selectedFixedDoi;
    if (doi) await copyDoi(doi);
});

for (const path of ["b", "c", "d"] as const) {
    el(`fixed-${path}`).addEventListener("click", async () => {
        const menu = await controller.loadFixedMenu(path);
        const list = el("fixed-menu");
        list.innerHTML = "";
        for (const product of menu) {
            const item = document.createElement("li");
            const pick = document.createElement("button");
            pick.textContent = `${product.title} (${product.assigned_doi})`;
            pick.addEventListener("click", async () => {
                const doi = await controller.pickFixed(product.product_id);
                el("minted-doi").textContent = doi ?? "";
                renderCart();
            });
            item.appendChild(pick);
            list.appendChild(item);
        }
        renderCart();
    });
}

renderCart();
