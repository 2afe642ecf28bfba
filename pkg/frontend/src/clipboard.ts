// Copy control for the cut-and-paste handoff: the DOI string is the only
// thing that crosses into the journal's submission form.

export type ClipboardWriter = (text: string) => Promise<void>;

const defaultWriter: ClipboardWriter = async (text) => {
    await navigator.clipboard.writeText(text);
};

export async function copyDoi(
    doi: string,
    writer: ClipboardWriter = defaultWriter,
): Promise<string> {
    await writer(doi);
    return doi;
}

/** Deep link to a submission session's attach form; the DOI travels in
 * the fragment so nothing but the string crosses over. */
export function attachFormLink(workflowBase: string, sessionId: string, doi: string): string {
    return `${workflowBase}/submission/${encodeURIComponent(sessionId)}#attach=${encodeURIComponent(doi)}`;
}
