// placeholder; full CLI arrives with the descriptor wiring
int main() { return 0; }
