/** Export panel: renders the Markdown artifact inline and offers the JSON
 * download. The downloaded bytes are exactly the API response body. */

export interface ExportHandlers {
  fetchMarkdown(): Promise<Uint8Array>;
  fetchJson(): Promise<Uint8Array>;
  triggerDownload(filename: string, bytes: Uint8Array, mime: string): void;
}

export function downloadBlob(filename: string, bytes: Uint8Array, mime: string): void {
  const blob = new Blob([bytes.buffer as ArrayBuffer], { type: mime });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement('a');
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export function renderExportPanel(handlers: ExportHandlers): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'panel panel-export';

  const preview = document.createElement('pre');
  preview.className = 'markdown-preview';
  preview.textContent = 'Loading export preview...';
  void handlers.fetchMarkdown().then((bytes) => {
    preview.textContent = new TextDecoder().decode(bytes);
  });

  const download = document.createElement('button');
  download.className = 'export-download';
  download.textContent = 'Export Data (JSON)';
  download.addEventListener('click', () => {
    void handlers.fetchJson().then((bytes) => {
      handlers.triggerDownload('evaluation-plan.json', bytes, 'application/json');
    });
  });

  panel.append(download, preview);
  return panel;
}
