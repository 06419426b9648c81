import { SearchApp } from './app.js';

new SearchApp(document).init();
