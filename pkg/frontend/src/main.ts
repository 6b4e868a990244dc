import { ApiClient } from './api.js';
import { browserSynthesis, PlaybackController } from './playback.js';
import { ChatUi } from './ui.js';

function boot(): void {
  const root = document.getElementById('app');
  if (!root) return;
  const api = new ApiClient(''); // same origin; the service mounts us under /app
  const playback = new PlaybackController(browserSynthesis());
  const ui = new ChatUi(root, { api, playback, storage: window.localStorage });
  void ui.start();
}

if (document.readyState === 'loading') {
  document.addEventListener('DOMContentLoaded', boot);
} else {
  boot();
}
