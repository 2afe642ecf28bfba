// Data-set cart: the ordered, deduplicated selection an author turns into
// one custom DOI.

import type { Observation } from "./api.js";

export interface CartState {
    items: Observation[];
    draftTitle: string;
    draftDescription: string;
    draftCreator: string;
    draftAffiliation: string;
    mintedDoi: string | null;
}

export function emptyCart(): CartState {
    return {
        items: [],
        draftTitle: "",
        draftDescription: "",
        draftCreator: "",
        draftAffiliation: "",
        mintedDoi: null,
    };
}

export interface AddResult {
    cart: CartState;
    added: number;
    alreadyPresent: number;
}

/** Add rows exactly once each; re-adding a carted row leaves it in place. */
export function addToCart(cart: CartState, rows: Observation[]): AddResult {
    const present = new Set(cart.items.map((item) => item.obs_id));
    const fresh = [];
    let alreadyPresent = 0;
    for (const row of rows) {
        if (present.has(row.obs_id)) {
            alreadyPresent += 1;
            continue;
        }
        present.add(row.obs_id);
        fresh.push(row);
    }
    return {
        cart: { ...cart, items: [...cart.items, ...fresh] },
        added: fresh.length,
        alreadyPresent,
    };
}

export function removeFromCart(cart: CartState, obsId: string): CartState {
    return { ...cart, items: cart.items.filter((item) => item.obs_id !== obsId) };
}

/** Mint is enabled only with a nonempty cart and filled title/creator. */
export function canMint(cart: CartState): boolean {
    return (
        cart.items.length > 0 &&
        cart.draftTitle.trim().length > 0 &&
        cart.draftCreator.trim().length > 0
    );
}
