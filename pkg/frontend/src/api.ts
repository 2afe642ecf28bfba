// Typed client for the archive and workflow services. The portal consumes
// only these public endpoints; it never fabricates identifiers itself.

export interface Observation {
    obs_id: string;
    mission: string;
    target_name: string;
    instrument: string;
    wavelength_band: string;
    data_url: string;
}

export interface FixedProduct {
    product_id: string;
    kind: string;
    title: string;
    description: string;
    landing_info_url: string;
    assigned_doi: string;
}

export interface QueryCriteria {
    mission?: string;
    target_name?: string;
    instrument?: string;
    wavelength_band?: string;
    allRows?: boolean;
    maxResults?: number;
}

export interface MintInput {
    creatorName: string;
    creatorAffiliation?: string;
    title: string;
    description: string;
    obsIds: string[];
}

export interface LandingDocument {
    doi: string;
    title: string;
    dataset: { kind: string; observation_count?: number; link: string };
    [key: string]: unknown;
}

export interface ResolutionResult {
    doi: string;
    outcome: string;
    redirect_to: string | null;
    landing: LandingDocument | null;
}

export class ApiError extends Error {
    constructor(
        public readonly status: number,
        public readonly code: string,
        detail: string,
    ) {
        super(detail);
    }
}

async function readError(response: Response): Promise<ApiError> {
    let code = "unknown";
    let detail = response.statusText;
    try {
        const body = (await response.json()) as { error?: string; detail?: string };
        code = body.error ?? code;
        detail = body.detail ?? detail;
    } catch {
        // non-JSON error body; keep the status text
    }
    return new ApiError(response.status, code, detail);
}

export class PortalApi {
    constructor(
        private readonly archiveBase: string,
        private readonly workflowBase: string = archiveBase,
    ) {}

    private async get<T>(base: string, path: string): Promise<T> {
        const response = await fetch(base + path, {
            headers: { accept: "application/json" },
        });
        if (!response.ok) throw await readError(response);
        return (await response.json()) as T;
    }

    private async post<T>(base: string, path: string, body: unknown): Promise<T> {
        const response = await fetch(base + path, {
            method: "POST",
            headers: { "content-type": "application/json", accept: "application/json" },
            body: JSON.stringify(body),
        });
        if (!response.ok) throw await readError(response);
        return (await response.json()) as T;
    }

    async queryObservations(criteria: QueryCriteria): Promise<Observation[]> {
        const params = new URLSearchParams();
        if (criteria.mission) params.set("mission", criteria.mission);
        if (criteria.target_name) params.set("target_name", criteria.target_name);
        if (criteria.instrument) params.set("instrument", criteria.instrument);
        if (criteria.wavelength_band) params.set("wavelength_band", criteria.wavelength_band);
        if (criteria.allRows) params.set("all_rows", "true");
        if (criteria.maxResults !== undefined) params.set("max_results", String(criteria.maxResults));
        const body = await this.get<{ observations: Observation[] }>(
            this.archiveBase,
            `/catalog/query?${params.toString()}`,
        );
        return body.observations;
    }

    async fixedProducts(kind?: string): Promise<FixedProduct[]> {
        const query = kind ? `?kind=${encodeURIComponent(kind)}` : "";
        const body = await this.get<{ products: FixedProduct[] }>(
            this.archiveBase,
            `/catalog/products${query}`,
        );
        return body.products;
    }

    async mintCustom(input: MintInput): Promise<{ doi: string; record: Record<string, unknown> }> {
        return await this.post(this.archiveBase, "/registry/mint", {
            creator_name: input.creatorName,
            creator_affiliation: input.creatorAffiliation ?? null,
            title: input.title,
            description: input.description,
            obs_ids: input.obsIds,
        });
    }

    async assignFixed(productId: string): Promise<{ doi: string }> {
        return await this.post(this.archiveBase, "/registry/assign-fixed", {
            product_id: productId,
        });
    }

    async resolve(doi: string): Promise<ResolutionResult> {
        return await this.get(this.archiveBase, `/resolve/${doi}`);
    }

    async attachToSubmission(sessionId: string, doi: string): Promise<void> {
        await this.post(this.workflowBase, `/submission/${sessionId}/attach`, { doi });
    }
}
