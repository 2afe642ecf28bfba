// Portal controller: search, cart, mint, fixed-DOI pick. Every DOI shown
// to the author originated in a service response.

import { ApiError, PortalApi } from "./api.js";
import type { FixedProduct, Observation, QueryCriteria } from "./api.js";
import { addToCart, canMint, emptyCart } from "./cart.js";
import type { CartState } from "./cart.js";

export interface MintSummary {
    doi: string;
    title: string;
    observationCount: number;
    state: string;
}

export interface PortalState {
    cart: CartState;
    searchResults: Observation[];
    fixedMenu: FixedProduct[];
    selectedFixedDoi: string | null;
    mintSummary: MintSummary | null;
    notice: string | null;
    errorBanner: string | null;
}

export class PortalController {
    state: PortalState = {
        cart: emptyCart(),
        searchResults: [],
        fixedMenu: [],
        selectedFixedDoi: null,
        mintSummary: null,
        notice: null,
        errorBanner: null,
    };

    constructor(private readonly api: PortalApi) {}

    async search(criteria: QueryCriteria): Promise<Observation[]> {
        try {
            this.state.searchResults = await this.api.queryObservations(criteria);
            this.state.errorBanner = null;
        } catch (error) {
            this.state.searchResults = [];
            this.state.errorBanner = describe(error);
        }
        return this.state.searchResults;
    }

    addResults(obsIds: string[]): void {
        const chosen = this.state.searchResults.filter((row) =>
            obsIds.includes(row.obs_id),
        );
        const result = addToCart(this.state.cart, chosen);
        this.state.cart = result.cart;
        this.state.notice =
            result.alreadyPresent > 0
                ? `${result.alreadyPresent} observation(s) were already in the cart`
                : null;
    }

    setDraft(fields: {
        title?: string;
        description?: string;
        creator?: string;
        affiliation?: string;
    }): void {
        const cart = this.state.cart;
        this.state.cart = {
            ...cart,
            draftTitle: fields.title ?? cart.draftTitle,
            draftDescription: fields.description ?? cart.draftDescription,
            draftCreator: fields.creator ?? cart.draftCreator,
            draftAffiliation: fields.affiliation ?? cart.draftAffiliation,
        };
    }

    mintEnabled(): boolean {
        return canMint(this.state.cart);
    }

    /** Mint over the cart; on failure the cart is left untouched for retry. */
    async mintFromCart(): Promise<MintSummary | null> {
        if (!this.mintEnabled()) {
            this.state.errorBanner = "fill in title and creator, and cart at least one observation";
            return null;
        }
        const cart = this.state.cart;
        try {
            const response = await this.api.mintCustom({
                creatorName: cart.draftCreator,
                creatorAffiliation: cart.draftAffiliation || undefined,
                title: cart.draftTitle,
                description: cart.draftDescription,
                obsIds: cart.items.map((item) => item.obs_id),
            });
            const record = response.record as {
                metadata?: { title?: string };
                state?: string;
            };
            this.state.mintSummary = {
                doi: response.doi,
                title: record.metadata?.title ?? cart.draftTitle,
                observationCount: cart.items.length,
                state: record.state ?? "unknown",
            };
            this.state.cart = { ...cart, mintedDoi: response.doi };
            this.state.errorBanner = null;
            return this.state.mintSummary;
        } catch (error) {
            // Registry errors render verbatim; the author may retry.
            this.state.errorBanner = describe(error);
            this.state.cart = cart;
            return null;
        }
    }

    async loadFixedMenu(path: "b" | "c" | "d"): Promise<FixedProduct[]> {
        const kind = { b: "hlsp", c: "catalog", d: "mission_subset" }[path];
        try {
            this.state.fixedMenu = await this.api.fixedProducts(kind);
            this.state.notice = this.state.fixedMenu.length
                ? null
                : "no fixed identifiers are defined for this category";
            this.state.errorBanner = null;
        } catch (error) {
            this.state.fixedMenu = [];
            this.state.errorBanner = describe(error);
        }
        return this.state.fixedMenu;
    }

    /** Selecting a product surfaces its pre-assigned DOI from the registry. */
    async pickFixed(productId: string): Promise<string | null> {
        try {
            const response = await this.api.assignFixed(productId);
            this.state.selectedFixedDoi = response.doi;
            this.state.errorBanner = null;
            return response.doi;
        } catch (error) {
            this.state.errorBanner = describe(error);
            return null;
        }
    }
}

function describe(error: unknown): string {
    if (error instanceof ApiError) return `${error.code}: ${error.message}`;
    if (error instanceof Error) return error.message;
    return String(error);
}
